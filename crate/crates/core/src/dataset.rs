//! Readers and writers for the files passed between stages.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDateTime;
use num_traits::Float;
use thiserror::Error;

use crate::filter::FilterReport;
use crate::ingest::{parse_date, parse_time, DATE_FORMAT, TIME_FORMAT};
use crate::metrics::{Feature, SbSample};
use crate::preprocess::{Auction, AuctionMeta, BidderHistory, CleanBid, Repair};

/// The nine canonical columns of the preprocessed dataset.
pub const CLEAN_HEADER: [&str; 9] = [
    "auction_id",
    "bidder_id",
    "seller_id",
    "bid_time",
    "bid_amount_usd",
    "opening_price_usd",
    "winning_price_usd",
    "n_bids",
    "duration_days",
];

pub const AUCTION_META_HEADER: [&str; 6] = [
    "auction_id",
    "seller_id",
    "product_url",
    "start_date",
    "start_time",
    "duration_days",
];

/// Cleaned histories; the last column holds a fraction, not a percentage.
pub const HISTORY_HEADER: [&str; 5] = [
    "bidder_id",
    "buyer_rating",
    "items_bid_on_30d",
    "n_bid_retractions_30d",
    "activity_with_seller_fraction",
];

pub const SAMPLE_HEADER: [&str; 11] = [
    "auction_id",
    "bidder_id",
    "opening_price_m",
    "early_bidding",
    "last_bidding",
    "bidding_ratio",
    "auction_bids",
    "buyer_tendency",
    "winning_ratio",
    "brbi",
    "bid_retraction",
];

pub const FILTER_REPORT_HEADER: [&str; 8] = [
    "feature",
    "q1",
    "q3",
    "lower",
    "upper",
    "min",
    "max",
    "flagged_count",
];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: bad {field}: {reason}")]
    Field {
        row: usize,
        field: &'static str,
        reason: String,
    },
    #[error("auction {0} has bids but no metadata row")]
    MissingMeta(u32),
}

fn writer<W: Write>(out: W, delimiter: u8) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out)
}

fn reader<R: Read>(input: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(input)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), DatasetError> {
    let found = rdr.headers()?;
    if !header_matches(found, expected) {
        return Err(DatasetError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

/// True when `headers` are exactly `expected`, ignoring surrounding blanks.
pub fn header_matches(headers: &csv::StringRecord, expected: &[&str]) -> bool {
    headers.iter().map(str::trim).eq(expected.iter().copied())
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    row: usize,
    name: &'static str,
) -> Result<T, DatasetError> {
    let raw = rec.get(i).unwrap_or("").trim();
    raw.parse().map_err(|_| DatasetError::Field {
        row,
        field: name,
        reason: format!("cannot parse `{raw}`"),
    })
}

/// Writes one row per bid, in auction order. Reals use the shortest exact
/// representation so a re-read reproduces them bit for bit.
pub fn write_clean<W: Write>(auctions: &[Auction], out: W, delimiter: u8) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(CLEAN_HEADER)?;
    for a in auctions {
        for b in &a.bids {
            w.write_record([
                a.auction_id.to_string(),
                b.bidder_id.clone(),
                b.seller_id.clone(),
                b.bid_time.to_string(),
                b.bid_amount_usd.to_string(),
                a.opening_price_usd.to_string(),
                a.winning_price_usd.to_string(),
                a.n_bids.to_string(),
                b.duration_days.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_auction_meta<W: Write>(
    auctions: &[Auction],
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(AUCTION_META_HEADER)?;
    for a in auctions {
        w.write_record([
            a.auction_id.to_string(),
            a.seller_id.clone(),
            a.product_url.clone(),
            a.start.format(DATE_FORMAT).to_string(),
            a.start.format(TIME_FORMAT).to_string(),
            a.duration_days.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the preprocessed dataset plus its auction metadata back into bids
/// and per-auction declared attributes.
pub fn read_clean<R1: Read, R2: Read>(
    dataset: R1,
    meta: R2,
    delimiter: u8,
) -> Result<(Vec<CleanBid>, BTreeMap<u32, AuctionMeta>), DatasetError> {
    let mut starts: BTreeMap<u32, (String, String, NaiveDateTime, u32)> = BTreeMap::new();
    let mut rdr = reader(meta, delimiter);
    check_header(&mut rdr, &AUCTION_META_HEADER)?;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let id: u32 = field(&rec, 0, row, "auction_id")?;
        let date = parse_date(rec.get(3).unwrap_or("")).map_err(|reason| DatasetError::Field {
            row,
            field: "start_date",
            reason,
        })?;
        let time = parse_time(rec.get(4).unwrap_or("")).map_err(|reason| DatasetError::Field {
            row,
            field: "start_time",
            reason,
        })?;
        let duration: u32 = field(&rec, 5, row, "duration_days")?;
        starts.insert(
            id,
            (
                rec.get(1).unwrap_or("").to_string(),
                rec.get(2).unwrap_or("").to_string(),
                date.and_time(time),
                duration,
            ),
        );
    }

    let mut bids = Vec::new();
    let mut metas = BTreeMap::new();
    let mut rdr = reader(dataset, delimiter);
    check_header(&mut rdr, &CLEAN_HEADER)?;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let auction_id: u32 = field(&rec, 0, row, "auction_id")?;
        let bid = CleanBid {
            auction_id,
            bidder_id: rec.get(1).unwrap_or("").to_string(),
            seller_id: rec.get(2).unwrap_or("").to_string(),
            bid_time: field(&rec, 3, row, "bid_time")?,
            bid_amount_usd: field(&rec, 4, row, "bid_amount_usd")?,
            duration_days: field(&rec, 8, row, "duration_days")?,
        };
        if let std::collections::btree_map::Entry::Vacant(e) = metas.entry(auction_id) {
            let (seller_id, product_url, start, duration_days) =
                starts
                    .get(&auction_id)
                    .cloned()
                    .ok_or(DatasetError::MissingMeta(auction_id))?;
            e.insert(AuctionMeta {
                seller_id,
                product_url,
                start,
                duration_days,
                opening_price_usd: field(&rec, 5, row, "opening_price_usd")?,
                declared_winning_usd: field(&rec, 6, row, "winning_price_usd")?,
                declared_n_bids: field(&rec, 7, row, "n_bids")?,
            });
        }
        bids.push(bid);
    }
    Ok((bids, metas))
}

pub fn write_histories<W: Write>(
    histories: &BTreeMap<String, BidderHistory>,
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(HISTORY_HEADER)?;
    for h in histories.values() {
        w.write_record([
            h.bidder_id.clone(),
            h.buyer_rating.to_string(),
            h.items_bid_on_30d.to_string(),
            h.n_bid_retractions_30d.to_string(),
            h.activity_with_seller.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_histories<R: Read>(
    input: R,
    delimiter: u8,
) -> Result<BTreeMap<String, BidderHistory>, DatasetError> {
    let mut rdr = reader(input, delimiter);
    check_header(&mut rdr, &HISTORY_HEADER)?;
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let activity: f64 = field(&rec, 4, row, "activity_with_seller_fraction")?;
        if !(0.0..=1.0).contains(&activity) {
            return Err(DatasetError::Field {
                row,
                field: "activity_with_seller_fraction",
                reason: format!("{activity} outside [0, 1]"),
            });
        }
        let h = BidderHistory {
            bidder_id: rec.get(0).unwrap_or("").to_string(),
            buyer_rating: field(&rec, 1, row, "buyer_rating")?,
            items_bid_on_30d: field(&rec, 2, row, "items_bid_on_30d")?,
            n_bid_retractions_30d: field(&rec, 3, row, "n_bid_retractions_30d")?,
            activity_with_seller: activity,
        };
        out.insert(h.bidder_id.clone(), h);
    }
    Ok(out)
}

pub fn write_repairs<W: Write>(repairs: &[Repair], out: W, delimiter: u8) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(["auction_id", "field", "declared", "repaired"])?;
    for r in repairs {
        w.write_record([
            r.auction_id.to_string().as_str(),
            r.field,
            &r.declared,
            &r.repaired,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fixed5<T: Float>(v: T) -> String {
    format!("{:.5}", v.to_f64().unwrap_or(f64::NAN))
}

/// Samples with the 11-column header, reals at five decimals.
pub fn write_samples<T: Float, W: Write>(
    samples: &[SbSample<T>],
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(SAMPLE_HEADER)?;
    for s in samples {
        let mut row = vec![s.auction_id.to_string(), s.bidder_id.clone()];
        row.extend(s.features().into_iter().map(fixed5));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples<T: Float, R: Read>(
    input: R,
    delimiter: u8,
) -> Result<Vec<SbSample<T>>, DatasetError> {
    let mut rdr = reader(input, delimiter);
    check_header(&mut rdr, &SAMPLE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let mut f = [T::zero(); 9];
        for (j, slot) in f.iter_mut().enumerate() {
            let v: f64 = field(&rec, j + 2, row, SAMPLE_HEADER[j + 2])?;
            *slot = T::from(v).ok_or(DatasetError::Field {
                row,
                field: SAMPLE_HEADER[j + 2],
                reason: "not representable".into(),
            })?;
        }
        out.push(SbSample::from_features(
            field(&rec, 0, row, "auction_id")?,
            rec.get(1).unwrap_or(""),
            f,
        ));
    }
    Ok(out)
}

/// Per-feature fences, rescale ranges and outlier counts.
pub fn write_filter_report<T: Float, W: Write>(
    report: &FilterReport<T>,
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(FILTER_REPORT_HEADER)?;
    for s in &report.features {
        let (lo, hi) = match s.range {
            Some((lo, hi)) => (fixed5(lo), fixed5(hi)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            s.feature.column().to_string(),
            fixed5(s.fences.q1),
            fixed5(s.fences.q3),
            fixed5(s.fences.lower),
            fixed5(s.fences.upper),
            lo,
            hi,
            s.flagged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per dropped sample with the offending features joined by `;`.
pub fn write_dropped<T: Float, W: Write>(
    report: &FilterReport<T>,
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = writer(out, delimiter);
    w.write_record(["auction_id", "bidder_id", "features"])?;
    for d in &report.dropped {
        let names: Vec<&str> = d.features.iter().map(|f: &Feature| f.column()).collect();
        w.write_record([
            d.sample.auction_id.to_string(),
            d.sample.bidder_id.clone(),
            names.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Before/after counts of the filter stage as an aligned text table.
pub fn filter_summary<T>(report: &FilterReport<T>) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:<24}{:>10}{:>10}\n", "", "Before", "After"));
    for (label, before, after) in [
        (
            "Number of Auctions",
            report.auctions_in,
            report.auctions_out,
        ),
        ("Number of Bidders", report.bidders_in, report.bidders_out),
        (
            "Number of SB Samples",
            report.samples_in,
            report.samples_out,
        ),
    ] {
        s.push_str(&format!("{label:<24}{before:>10}{after:>10}\n"));
    }
    s.push_str(&format!(
        "{:<24}{:>10}\n",
        "Samples Dropped", report.samples_dropped
    ));
    s
}
