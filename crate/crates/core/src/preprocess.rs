//! Cleansing, reformatting and consistency repair of raw bid records.
//!
//! The stage runs in a fixed order: exact-duplicate removal, masked-id
//! removal, auction id assignment, per-record conversion (bid time, USD
//! amounts, duration), grouping into auctions and finally repair of the
//! declared winning price and bid count.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use log::warn;
use thiserror::Error;

use crate::ingest::{is_masked_id, parse_date, parse_time, Defect, RawBidRecord, RawHistoryRecord};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
/// Auction lengths the marketplace offers.
pub const VALID_DURATIONS: [u32; 5] = [1, 3, 5, 7, 10];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("unparseable {component}: {reason}")]
    Timestamp {
        component: &'static str,
        reason: String,
    },
    #[error("no exchange rate for currency `{0}`")]
    UnknownCurrency(String),
    #[error("exchange rate for `{code}` must be positive, got {rate}")]
    InvalidRate { code: String, rate: f64 },
    #[error("unrecognized duration `{0}`")]
    Duration(String),
    #[error("duration of {0} days is not offered (expected 1, 3, 5, 7 or 10)")]
    DurationOutOfSet(u32),
    #[error("bid amount must be positive, got {0}")]
    NonPositiveAmount(f64),
    #[error("invalid percentage `{0}`")]
    Percentage(String),
}

/// USD value of one unit of each currency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    rates: BTreeMap<String, f64>,
}

impl RateTable {
    pub fn new<I, S>(rates: I) -> Result<Self, ConvertError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut table = Self::default();
        for (code, rate) in rates {
            table.insert(code, rate)?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, code: impl Into<String>, rate: f64) -> Result<(), ConvertError> {
        let code = code.into().to_ascii_uppercase();
        if !(rate.is_finite() && rate > 0.0) {
            return Err(ConvertError::InvalidRate { code, rate });
        }
        self.rates.insert(code, rate);
        Ok(())
    }

    pub fn rate(&self, code: &str) -> Option<f64> {
        let code = code.to_ascii_uppercase();
        if code == "USD" {
            return Some(self.rates.get("USD").copied().unwrap_or(1.0));
        }
        self.rates.get(&code).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.rates.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

pub fn convert_currency(amount: f64, code: &str, rates: &RateTable) -> Result<f64, ConvertError> {
    if code.eq_ignore_ascii_case("USD") {
        return Ok(amount);
    }
    rates
        .rate(code)
        .map(|r| amount * r)
        .ok_or_else(|| ConvertError::UnknownCurrency(code.to_string()))
}

/// Elapsed time from auction start to the bid, in fractional days.
///
/// Negative values and values beyond the auction length are returned as-is.
pub fn compute_bid_time(
    start_date: NaiveDate,
    start_time: NaiveTime,
    bid_date: NaiveDate,
    bid_time: NaiveTime,
) -> f64 {
    elapsed_days(start_date.and_time(start_time), bid_date.and_time(bid_time))
}

pub fn elapsed_days(start: NaiveDateTime, at: NaiveDateTime) -> f64 {
    let d = at.signed_duration_since(start);
    let secs = d.num_seconds();
    let nanos = (d - chrono::Duration::seconds(secs))
        .num_nanoseconds()
        .unwrap_or(0);
    (secs as f64 + nanos as f64 * 1e-9) / SECONDS_PER_DAY
}

/// [`compute_bid_time`] over textual components; the error names the bad one.
pub fn bid_time_from_text(
    start_date: &str,
    start_time: &str,
    bid_date: &str,
    bid_time: &str,
) -> Result<f64, ConvertError> {
    fn ts<T>(component: &'static str, r: Result<T, String>) -> Result<T, ConvertError> {
        r.map_err(|reason| ConvertError::Timestamp { component, reason })
    }
    Ok(compute_bid_time(
        ts("auction start date", parse_date(start_date))?,
        ts("auction start time", parse_time(start_time))?,
        ts("bid date", parse_date(bid_date))?,
        ts("bid time", parse_time(bid_time))?,
    ))
}

/// `"7 Days"` → 7. Accepts `N Day` / `N Days` in any case.
pub fn parse_duration(text: &str) -> Result<u32, ConvertError> {
    let err = || ConvertError::Duration(text.to_string());
    let mut parts = text.split_whitespace();
    let (Some(n), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(err());
    };
    let unit = unit.to_ascii_lowercase();
    if unit != "day" && unit != "days" {
        return Err(err());
    }
    let days: u32 = n.parse().map_err(|_| err())?;
    if !VALID_DURATIONS.contains(&days) {
        return Err(ConvertError::DurationOutOfSet(days));
    }
    Ok(days)
}

/// `"90%"` (or bare `"90"`) → 0.90.
pub fn percentage_to_fraction(text: &str) -> Result<f64, ConvertError> {
    let t = text.trim();
    let num = t.strip_suffix('%').unwrap_or(t).trim();
    let v: f64 = num
        .parse()
        .map_err(|_| ConvertError::Percentage(text.to_string()))?;
    if !(0.0..=100.0).contains(&v) {
        return Err(ConvertError::Percentage(text.to_string()));
    }
    Ok(v / 100.0)
}

/// Keeps the first occurrence of every exact duplicate, preserving order.
pub fn deduplicate(records: Vec<RawBidRecord>) -> Vec<RawBidRecord> {
    let mut seen = HashSet::new();
    records
        .into_iter()
        .filter(|r| seen.insert(r.canonical_fields()))
        .collect()
}

pub fn drop_masked(records: Vec<RawBidRecord>) -> (Vec<RawBidRecord>, usize) {
    let before = records.len();
    let kept: Vec<_> = records
        .into_iter()
        .filter(|r| !is_masked_id(&r.bidder_id))
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Auction ids keyed by `(seller_id, product_url)`, numbered from 1 in order
/// of first appearance.
pub fn assign_auction_ids(records: &[RawBidRecord]) -> BTreeMap<(String, String), u32> {
    let mut ids = BTreeMap::new();
    for r in records {
        let next = ids.len() as u32 + 1;
        ids.entry((r.seller_id.clone(), r.product_url.clone()))
            .or_insert(next);
    }
    ids
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanBid {
    pub auction_id: u32,
    pub bidder_id: String,
    pub seller_id: String,
    /// Fractional days since the auction started.
    pub bid_time: f64,
    pub bid_amount_usd: f64,
    pub duration_days: u32,
}

/// Auction-level attributes as declared by the source, before repair.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionMeta {
    pub seller_id: String,
    pub product_url: String,
    pub start: NaiveDateTime,
    pub duration_days: u32,
    pub opening_price_usd: f64,
    pub declared_winning_usd: f64,
    pub declared_n_bids: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Auction {
    pub auction_id: u32,
    pub seller_id: String,
    pub product_url: String,
    pub start: NaiveDateTime,
    pub duration_days: u32,
    pub opening_price_usd: f64,
    pub winning_price_usd: f64,
    pub n_bids: u32,
    /// Ascending by bid time, then amount, then bidder id.
    pub bids: Vec<CleanBid>,
}

impl Auction {
    pub fn end(&self) -> NaiveDateTime {
        self.start + chrono::Duration::days(self.duration_days as i64)
    }

    pub fn max_bid(&self) -> Option<f64> {
        self.bids.iter().map(|b| b.bid_amount_usd).reduce(f64::max)
    }

    /// Holder of the highest bid; the earliest such bid wins ties.
    pub fn winner(&self) -> Option<&str> {
        let mut best: Option<&CleanBid> = None;
        for b in &self.bids {
            if best.is_none_or(|w| b.bid_amount_usd > w.bid_amount_usd) {
                best = Some(b);
            }
        }
        best.map(|b| b.bidder_id.as_str())
    }

    pub fn is_consistent(&self) -> bool {
        self.max_bid() == Some(self.winning_price_usd) && self.n_bids as usize == self.bids.len()
    }
}

fn bid_order(a: &CleanBid, b: &CleanBid) -> std::cmp::Ordering {
    a.bid_time
        .total_cmp(&b.bid_time)
        .then(a.bid_amount_usd.total_cmp(&b.bid_amount_usd))
        .then_with(|| a.bidder_id.cmp(&b.bidder_id))
}

/// Groups bids into auctions ordered by id, bids ordered within each.
///
/// Auctions without bids, and bids without auction metadata, are left out
/// and their ids returned.
pub fn group_auctions(
    bids: Vec<CleanBid>,
    metas: &BTreeMap<u32, AuctionMeta>,
) -> (Vec<Auction>, Vec<u32>) {
    let mut grouped: BTreeMap<u32, Vec<CleanBid>> = BTreeMap::new();
    for b in bids {
        grouped.entry(b.auction_id).or_default().push(b);
    }
    let mut excluded = Vec::new();
    let mut auctions = Vec::new();
    for (&id, meta) in metas {
        let Some(mut bids) = grouped.remove(&id) else {
            warn!("auction {id} has no bids; excluded");
            excluded.push(id);
            continue;
        };
        bids.sort_by(bid_order);
        auctions.push(Auction {
            auction_id: id,
            seller_id: meta.seller_id.clone(),
            product_url: meta.product_url.clone(),
            start: meta.start,
            duration_days: meta.duration_days,
            opening_price_usd: meta.opening_price_usd,
            winning_price_usd: meta.declared_winning_usd,
            n_bids: meta.declared_n_bids,
            bids,
        });
    }
    for id in grouped.into_keys() {
        warn!("bids reference auction {id} without metadata; excluded");
        excluded.push(id);
    }
    (auctions, excluded)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repair {
    pub auction_id: u32,
    pub field: &'static str,
    pub declared: String,
    pub repaired: String,
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "auction {}: {} {} -> {}",
            self.auction_id, self.field, self.declared, self.repaired
        )
    }
}

/// Sets the winning price to the highest bid and the bid count to the
/// number of bids, recording each change. `a.bids` must be non-empty.
pub fn repair_consistency(mut a: Auction) -> (Auction, Vec<Repair>) {
    let mut repairs = Vec::new();
    if let Some(max) = a.max_bid() {
        if max != a.winning_price_usd {
            repairs.push(Repair {
                auction_id: a.auction_id,
                field: "winning_price_usd",
                declared: a.winning_price_usd.to_string(),
                repaired: max.to_string(),
            });
            a.winning_price_usd = max;
        }
    }
    let count = a.bids.len() as u32;
    if count != a.n_bids {
        repairs.push(Repair {
            auction_id: a.auction_id,
            field: "n_bids",
            declared: a.n_bids.to_string(),
            repaired: count.to_string(),
        });
        a.n_bids = count;
    }
    (a, repairs)
}

/// Removes exact duplicate clean bids, groups and repairs.
pub fn normalize(
    bids: Vec<CleanBid>,
    metas: &BTreeMap<u32, AuctionMeta>,
) -> (Vec<Auction>, Vec<Repair>, usize) {
    let before = bids.len();
    let mut seen = HashSet::new();
    let bids: Vec<CleanBid> = bids
        .into_iter()
        .filter(|b| {
            seen.insert((
                b.auction_id,
                b.bidder_id.clone(),
                b.seller_id.clone(),
                b.bid_time.to_bits(),
                b.bid_amount_usd.to_bits(),
                b.duration_days,
            ))
        })
        .collect();
    let duplicates = before - bids.len();
    let (grouped, _) = group_auctions(bids, metas);
    let mut repairs = Vec::new();
    let auctions = grouped
        .into_iter()
        .map(|a| {
            let (a, mut r) = repair_consistency(a);
            repairs.append(&mut r);
            a
        })
        .collect();
    (auctions, repairs, duplicates)
}

/// Record accounting for one preprocess run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessCounts {
    pub input: usize,
    pub duplicates: usize,
    pub masked: usize,
    pub defects: usize,
    /// Bids of auctions excluded for missing metadata (always 0 for raw input).
    pub orphaned: usize,
    pub output_bids: usize,
}

impl PreprocessCounts {
    pub fn balanced(&self) -> bool {
        self.input
            == self.output_bids + self.duplicates + self.masked + self.defects + self.orphaned
    }
}

#[derive(Debug, Clone, Default)]
pub struct PreprocessOutput {
    pub auctions: Vec<Auction>,
    pub repairs: Vec<Repair>,
    /// `row` is the 1-based position in the input record list.
    pub defects: Vec<Defect>,
    pub counts: PreprocessCounts,
}

fn to_clean(
    r: &RawBidRecord,
    auction_id: u32,
    rates: &RateTable,
) -> Result<(CleanBid, AuctionMeta), (&'static str, ConvertError)> {
    let duration_days = parse_duration(&r.duration_text).map_err(|e| ("duration", e))?;
    let usd = |v| convert_currency(v, &r.bid_currency, rates).map_err(|e| ("bid_currency", e));
    let bid_amount_usd = usd(r.bid_amount)?;
    let opening_price_usd = usd(r.opening_price)?;
    let declared_winning_usd = usd(r.declared_winning_price)?;
    if !(bid_amount_usd > 0.0) {
        return Err(("bid_amount", ConvertError::NonPositiveAmount(r.bid_amount)));
    }
    let bid = CleanBid {
        auction_id,
        bidder_id: r.bidder_id.clone(),
        seller_id: r.seller_id.clone(),
        bid_time: compute_bid_time(
            r.auction_start_date,
            r.auction_start_time,
            r.bid_date,
            r.bid_time,
        ),
        bid_amount_usd,
        duration_days,
    };
    let meta = AuctionMeta {
        seller_id: r.seller_id.clone(),
        product_url: r.product_url.clone(),
        start: r.auction_start_date.and_time(r.auction_start_time),
        duration_days,
        opening_price_usd,
        declared_winning_usd,
        declared_n_bids: r.declared_n_bids,
    };
    Ok((bid, meta))
}

/// Runs the whole stage over parsed bid records.
pub fn preprocess(records: Vec<RawBidRecord>, rates: &RateTable) -> PreprocessOutput {
    let mut counts = PreprocessCounts {
        input: records.len(),
        ..Default::default()
    };

    let mut seen = HashSet::new();
    let mut indexed: Vec<(usize, RawBidRecord)> = records
        .into_iter()
        .enumerate()
        .filter(|(_, r)| seen.insert(r.canonical_fields()))
        .collect();
    counts.duplicates = counts.input - indexed.len();

    let before = indexed.len();
    indexed.retain(|(_, r)| !is_masked_id(&r.bidder_id));
    counts.masked = before - indexed.len();

    let kept: Vec<RawBidRecord> = indexed.iter().map(|(_, r)| r.clone()).collect();
    let ids = assign_auction_ids(&kept);

    let mut defects = Vec::new();
    let mut bids = Vec::new();
    let mut metas = BTreeMap::new();
    for (pos, r) in &indexed {
        let id = ids[&(r.seller_id.clone(), r.product_url.clone())];
        match to_clean(r, id, rates) {
            Ok((bid, meta)) => {
                metas.entry(id).or_insert(meta);
                bids.push(bid);
            }
            Err((field, e)) => defects.push(Defect {
                row: pos + 1,
                field: field.to_string(),
                reason: e.to_string(),
            }),
        }
    }
    counts.defects = defects.len();

    let (auctions, repairs, dup_clean) = normalize(bids, &metas);
    counts.duplicates += dup_clean;
    counts.output_bids = auctions.iter().map(|a| a.bids.len()).sum();
    PreprocessOutput {
        auctions,
        repairs,
        defects,
        counts,
    }
}

/// A bidder's 30-day history with the activity percentage as a fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct BidderHistory {
    pub bidder_id: String,
    pub buyer_rating: u64,
    pub items_bid_on_30d: u64,
    pub n_bid_retractions_30d: u64,
    /// In [0, 1].
    pub activity_with_seller: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HistoryCounts {
    pub input: usize,
    pub duplicates: usize,
    pub masked: usize,
    pub defects: usize,
    /// Repeated bidder ids with differing values; the first row is kept.
    pub conflicts: usize,
    pub output: usize,
}

pub fn clean_histories(
    records: Vec<RawHistoryRecord>,
) -> (BTreeMap<String, BidderHistory>, Vec<Defect>, HistoryCounts) {
    let mut counts = HistoryCounts {
        input: records.len(),
        ..Default::default()
    };
    let mut seen = HashSet::new();
    let mut out = BTreeMap::new();
    let mut defects = Vec::new();
    for (pos, r) in records.into_iter().enumerate() {
        if !seen.insert(r.clone()) {
            counts.duplicates += 1;
            continue;
        }
        if is_masked_id(&r.bidder_id) {
            counts.masked += 1;
            continue;
        }
        let activity = match percentage_to_fraction(&r.activity_with_seller_raw) {
            Ok(v) => v,
            Err(e) => {
                defects.push(Defect {
                    row: pos + 1,
                    field: "activity_with_seller".into(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if out.contains_key(&r.bidder_id) {
            warn!(
                "conflicting history rows for bidder {}; keeping the first",
                r.bidder_id
            );
            counts.conflicts += 1;
            continue;
        }
        out.insert(
            r.bidder_id.clone(),
            BidderHistory {
                bidder_id: r.bidder_id,
                buyer_rating: r.buyer_rating,
                items_bid_on_30d: r.items_bid_on_30d,
                n_bid_retractions_30d: r.n_bid_retractions_30d,
                activity_with_seller: activity,
            },
        );
    }
    counts.defects = defects.len();
    counts.output = out.len();
    (out, defects, counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }
    fn t(s: &str) -> NaiveTime {
        parse_time(s).unwrap()
    }

    pub(crate) fn raw(
        seller: &str,
        url: &str,
        bidder: &str,
        amount: f64,
        time: &str,
    ) -> RawBidRecord {
        RawBidRecord {
            product_url: url.into(),
            seller_id: seller.into(),
            bidder_id: bidder.into(),
            bid_amount: amount,
            bid_currency: "USD".into(),
            bid_date: d("2017-04-02"),
            bid_time: t(time),
            auction_start_date: d("2017-04-01"),
            auction_start_time: t("00:00:00"),
            duration_text: "7 Days".into(),
            opening_price: 100.0,
            declared_winning_price: 500.0,
            declared_n_bids: 70,
            extra_fields: BTreeMap::new(),
        }
    }

    #[test]
    fn bid_time_examples() {
        let start = d("2017-04-01");
        assert_eq!(
            compute_bid_time(start, t("00:00:00"), start, t("00:00:00")),
            0.0
        );
        assert_eq!(
            compute_bid_time(start, t("00:00:00"), start, t("12:00:00")),
            0.5
        );
        let v = compute_bid_time(start, t("00:00:00"), d("2017-04-02"), t("06:52:08"));
        assert!((v - 1.2862).abs() < 1e-4, "{v}");
        let before = compute_bid_time(start, t("12:00:00"), start, t("06:00:00"));
        assert_eq!(before, -0.25);
    }

    #[test]
    fn bid_time_text_names_bad_component() {
        let err =
            bid_time_from_text("2017-04-01", "00:00:00", "2017-13-02", "01:00:00").unwrap_err();
        assert!(matches!(
            err,
            ConvertError::Timestamp {
                component: "bid date",
                ..
            }
        ));
        let err = bid_time_from_text("2017-04-01", "25:00", "2017-04-02", "01:00:00").unwrap_err();
        assert!(matches!(
            err,
            ConvertError::Timestamp {
                component: "auction start time",
                ..
            }
        ));
    }

    #[test]
    fn currency() {
        let rates = RateTable::new([("GBP", 1.28)]).unwrap();
        assert_eq!(convert_currency(100.0, "USD", &rates).unwrap(), 100.0);
        assert!((convert_currency(100.0, "GBP", &rates).unwrap() - 128.0).abs() < 1e-9);
        assert_eq!(
            convert_currency(250.0, "XYZ", &rates),
            Err(ConvertError::UnknownCurrency("XYZ".into()))
        );
        assert!(RateTable::new([("EUR", 0.0)]).is_err());
        assert!(RateTable::new([("EUR", -1.0)]).is_err());
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("7 Days").unwrap(), 7);
        assert_eq!(parse_duration("1 Day").unwrap(), 1);
        assert_eq!(parse_duration("  10 days ").unwrap(), 10);
        assert!(matches!(
            parse_duration("2 Weeks"),
            Err(ConvertError::Duration(_))
        ));
        assert_eq!(
            parse_duration("4 Days"),
            Err(ConvertError::DurationOutOfSet(4))
        );
        assert!(parse_duration("Days").is_err());
    }

    #[test]
    fn percentages() {
        assert!((percentage_to_fraction("90%").unwrap() - 0.90).abs() < 1e-12);
        assert_eq!(percentage_to_fraction("100%").unwrap(), 1.0);
        assert_eq!(percentage_to_fraction("0%").unwrap(), 0.0);
        assert_eq!(percentage_to_fraction("30").unwrap(), 0.3);
        assert!(percentage_to_fraction("130%").is_err());
        assert!(percentage_to_fraction("-5%").is_err());
        assert!(percentage_to_fraction("lots").is_err());
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let r1 = raw("s1", "u1", "a", 10.0, "01:00:00");
        let r2 = raw("s1", "u1", "b", 11.0, "02:00:00");
        assert_eq!(
            deduplicate(vec![r1.clone(), r1.clone(), r2.clone()]),
            vec![r1.clone(), r2.clone()]
        );
        assert_eq!(deduplicate(vec![r2.clone(), r1.clone()]), vec![r2, r1]);
    }

    #[test]
    fn masked_removal() {
        let mut recs: Vec<_> = (0..10)
            .map(|i| raw("s", "u", &format!("b{i}"), 10.0 + i as f64, "01:00:00"))
            .collect();
        recs[2].bidder_id = "****".into();
        recs[5].bidder_id = "".into();
        recs[9].bidder_id = " ** ".into();
        recs[7].bidder_id = "a***e".into();
        let (kept, dropped) = drop_masked(recs.clone());
        assert_eq!((kept.len(), dropped), (7, 3));
        let (all, none) = drop_masked(vec![recs[0].clone(), recs[1].clone()]);
        assert_eq!((all.len(), none), (2, 0));
        let (empty, n) = drop_masked(vec![recs[2].clone(), recs[5].clone()]);
        assert_eq!((empty.len(), n), (0, 2));
    }

    #[test]
    fn auction_ids_by_first_appearance() {
        let recs = vec![
            raw("s1", "u1", "a", 1.0, "01:00:00"),
            raw("s2", "u1", "a", 1.0, "01:00:00"),
            raw("s1", "u1", "b", 2.0, "01:00:00"),
        ];
        let ids = assign_auction_ids(&recs);
        let got: Vec<u32> = recs
            .iter()
            .map(|r| ids[&(r.seller_id.clone(), r.product_url.clone())])
            .collect();
        assert_eq!(got, vec![1, 2, 1]);
        assert_eq!(assign_auction_ids(&recs), ids);
    }

    fn meta(seller: &str) -> AuctionMeta {
        AuctionMeta {
            seller_id: seller.into(),
            product_url: "u".into(),
            start: d("2017-04-01").and_time(t("00:00:00")),
            duration_days: 7,
            opening_price_usd: 100.0,
            declared_winning_usd: 500.0,
            declared_n_bids: 70,
        }
    }

    fn bid(id: u32, bidder: &str, time: f64, amount: f64) -> CleanBid {
        CleanBid {
            auction_id: id,
            bidder_id: bidder.into(),
            seller_id: "s".into(),
            bid_time: time,
            bid_amount_usd: amount,
            duration_days: 7,
        }
    }

    #[test]
    fn grouping_sorts_and_splits() {
        let metas: BTreeMap<_, _> = [(1, meta("s")), (2, meta("s")), (3, meta("s"))].into();
        let bids = vec![
            bid(2, "x", 3.0, 30.0),
            bid(1, "a", 2.0, 20.0),
            bid(1, "b", 0.5, 10.0),
            bid(2, "y", 1.0, 15.0),
            bid(1, "c", 2.0, 19.0),
        ];
        let (auctions, excluded) = group_auctions(bids, &metas);
        assert_eq!(excluded, vec![3]);
        assert_eq!(auctions.len(), 2);
        assert_eq!(auctions[0].bids.len(), 3);
        assert_eq!(auctions[1].bids.len(), 2);
        let order: Vec<&str> = auctions[0]
            .bids
            .iter()
            .map(|b| b.bidder_id.as_str())
            .collect();
        assert_eq!(order, ["b", "c", "a"]);
    }

    #[test]
    fn repair_examples() {
        let metas: BTreeMap<_, _> = [(1, meta("s"))].into();
        let mut bids: Vec<_> = (0..60)
            .map(|i| bid(1, "b", i as f64 * 0.1, 100.0 + i as f64))
            .collect();
        bids[59].bid_amount_usd = 581.0;
        let (mut grouped, _) = group_auctions(bids, &metas);
        let a = grouped.remove(0);
        let (fixed, repairs) = repair_consistency(a);
        assert_eq!(fixed.winning_price_usd, 581.0);
        assert_eq!(fixed.n_bids, 60);
        assert_eq!(repairs.len(), 2);
        assert_eq!(repairs[0].field, "winning_price_usd");
        assert_eq!(repairs[1].declared, "70");
        let (again, none) = repair_consistency(fixed.clone());
        assert!(none.is_empty());
        assert_eq!(again, fixed);
    }

    #[test]
    fn single_bid_auction_repairs_count() {
        let metas: BTreeMap<_, _> = [(1, meta("s"))].into();
        let (grouped, _) = group_auctions(vec![bid(1, "a", 1.0, 500.0)], &metas);
        let (a, repairs) = repair_consistency(grouped.into_iter().next().unwrap());
        assert_eq!(a.n_bids, 1);
        assert_eq!(repairs.len(), 1);
    }

    #[test]
    fn stage_accounting_and_conversion() {
        let mut recs = vec![
            raw("s1", "u1", "a", 100.0, "01:00:00"),
            raw("s1", "u1", "a", 100.0, "01:00:00"),
            raw("s1", "u1", "****", 110.0, "02:00:00"),
            raw("s1", "u1", "b", 120.0, "03:00:00"),
            raw("s2", "u2", "c", 200.0, "03:00:00"),
            raw("s2", "u2", "d", 50.0, "04:00:00"),
        ];
        recs[4].bid_currency = "GBP".into();
        recs[5].bid_currency = "JPY".into();
        let rates = RateTable::new([("GBP", 1.25)]).unwrap();
        let out = preprocess(recs, &rates);
        assert_eq!(out.counts.duplicates, 1);
        assert_eq!(out.counts.masked, 1);
        assert_eq!(out.counts.defects, 1);
        assert_eq!(out.counts.output_bids, 3);
        assert!(out.counts.balanced());
        assert_eq!(out.defects[0].row, 6);
        assert_eq!(out.auctions.len(), 2);
        let a2 = &out.auctions[1];
        assert_eq!(a2.bids[0].bid_amount_usd, 250.0);
        assert_eq!(a2.opening_price_usd, 125.0);
        assert!(out.auctions.iter().all(Auction::is_consistent));
    }

    #[test]
    fn histories_are_cleaned() {
        let h = |id: &str, act: &str| RawHistoryRecord {
            bidder_id: id.into(),
            buyer_rating: 0,
            items_bid_on_30d: 8,
            n_bid_retractions_30d: 1,
            activity_with_seller_raw: act.into(),
        };
        let (map, defects, counts) = clean_histories(vec![
            h("z***c", "90%"),
            h("z***c", "90%"),
            h("****", "1%"),
            h("q", "150%"),
            h("z***c", "10%"),
        ]);
        assert_eq!(map.len(), 1);
        assert_eq!(defects.len(), 1);
        assert_eq!(counts.duplicates, 1);
        assert_eq!(counts.masked, 1);
        assert_eq!(counts.conflicts, 1);
        assert!((map["z***c"].activity_with_seller - 0.9).abs() < 1e-12);
    }
}
