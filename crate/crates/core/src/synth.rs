//! Seeded synthetic auctions with injected shill bidders.
//!
//! Output rows use the ingest schema, so generated data runs through the
//! whole pipeline. Every auction draws from its own ChaCha stream derived
//! from the seed; the result depends on the seed alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ingest::{RawBidRecord, RawHistoryRecord};
use crate::metrics::SbSample;
use crate::preprocess::{Auction, RateTable, VALID_DURATIONS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
}

fn infeasible(msg: impl Into<String>) -> SynthError {
    SynthError::Infeasible(msg.into())
}

/// How an injected shill behaves.
#[derive(Debug, Clone, PartialEq)]
pub struct ShillProfile {
    /// First bid lands before this fraction of the auction.
    pub early_bid_fraction: f64,
    /// No bids at or after this fraction of the auction.
    pub stop_fraction: f64,
    /// Minimum share of an auction's bids placed by the shill.
    pub bid_share_target: f64,
    pub avoid_winning: bool,
    pub zero_rating: bool,
    pub items_30d: u64,
    pub retractions: u64,
}

impl Default for ShillProfile {
    fn default() -> Self {
        Self {
            early_bid_fraction: 0.1,
            stop_fraction: 0.8,
            bid_share_target: 0.5,
            avoid_winning: true,
            zero_rating: true,
            items_30d: 8,
            retractions: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_auctions: usize,
    pub n_honest_bidders: usize,
    pub n_shills: usize,
    /// Auctions each shill bids in, all run by its target seller.
    pub auctions_per_shill: usize,
    /// Sellers running the auctions no shill touches.
    pub n_honest_sellers: usize,
    /// Distinct products; a seller never lists one product twice.
    pub n_products: usize,
    pub durations: Vec<u32>,
    pub opening_price: (f64, f64),
    /// Range of the step between consecutive bids, in USD.
    pub increment: (f64, f64),
    /// Honest bidders per auction, inclusive.
    pub honest_per_auction: (usize, usize),
    /// Chance an honest bidder bids again (geometric bid counts).
    pub honest_repeat_p: f64,
    pub max_bids_per_bidder: usize,
    pub first_start: NaiveDateTime,
    /// Auctions start uniformly within this many days of `first_start`.
    pub start_span_days: u32,
    pub shill: ShillProfile,
    /// Chance per auction that its final bid is stamped after the close.
    pub late_bid_rate: f64,
    /// Chance per bid row of being emitted twice.
    pub duplicate_rate: f64,
    /// Chance per auction of an extra row with a fully masked bidder.
    pub masked_rate: f64,
    /// Chance per auction of being priced in a non-USD currency from `rates`.
    pub foreign_rate: f64,
    /// Chance per auction that the declared winning price and bid count are wrong.
    pub mismatch_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_auctions: 200,
            n_honest_bidders: 300,
            n_shills: 20,
            auctions_per_shill: 6,
            n_honest_sellers: 30,
            n_products: 12,
            durations: VALID_DURATIONS.to_vec(),
            opening_price: (1.0, 300.0),
            increment: (1.0, 25.0),
            honest_per_auction: (3, 8),
            honest_repeat_p: 0.5,
            max_bids_per_bidder: 8,
            first_start: NaiveDate::from_ymd_opt(2017, 4, 1)
                .and_then(|d| d.and_hms_opt(0, 0, 0))
                .expect("valid constant date"),
            start_span_days: 60,
            shill: ShillProfile::default(),
            late_bid_rate: 0.0,
            duplicate_rate: 0.0,
            masked_rate: 0.0,
            foreign_rate: 0.0,
            mismatch_rate: 0.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Honest,
    Shill,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Honest => "honest",
            Label::Shill => "shill",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectedShill {
    pub bidder_id: String,
    pub target_seller: String,
    pub profile: ShillProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub records: Vec<RawBidRecord>,
    pub histories: Vec<RawHistoryRecord>,
    pub truth: BTreeMap<String, Label>,
    pub shills: Vec<InjectedShill>,
}

fn prob(name: &str, p: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(infeasible(format!("{name} must be in [0, 1], got {p}")))
    }
}

impl SynthConfig {
    pub fn validate(&self, rates: &RateTable) -> Result<(), SynthError> {
        let s = &self.shill;
        if self.n_auctions == 0 {
            return Err(infeasible("n_auctions must be positive"));
        }
        prob("early_bid_fraction", s.early_bid_fraction)?;
        prob("stop_fraction", s.stop_fraction)?;
        prob("bid_share_target", s.bid_share_target)?;
        if s.early_bid_fraction <= 0.0 {
            return Err(infeasible("early_bid_fraction must be positive"));
        }
        if s.early_bid_fraction > s.stop_fraction {
            return Err(infeasible("early_bid_fraction exceeds stop_fraction"));
        }
        if self.n_shills > 0 && s.stop_fraction >= 1.0 {
            return Err(infeasible(
                "stop_fraction of 1 leaves no room for an honest closing bid",
            ));
        }
        if self.n_shills > 0 && s.bid_share_target >= 1.0 {
            return Err(infeasible(
                "bid_share_target of 1 is impossible when honest bidders also take part",
            ));
        }
        let (lo, hi) = self.honest_per_auction;
        if lo == 0 || lo > hi {
            return Err(infeasible(
                "honest_per_auction must satisfy 1 <= min <= max",
            ));
        }
        if hi > self.n_honest_bidders {
            return Err(infeasible(
                "more honest bidders per auction than honest bidders",
            ));
        }
        if self.n_shills * self.auctions_per_shill > self.n_auctions {
            return Err(infeasible("shill auctions exceed n_auctions"));
        }
        if self.n_shills > 0 && self.auctions_per_shill == 0 {
            return Err(infeasible("auctions_per_shill must be positive"));
        }
        if self.n_products == 0 || self.auctions_per_shill > self.n_products {
            return Err(infeasible("each shill's auctions need distinct products"));
        }
        let honest_auctions = self.n_auctions - self.n_shills * self.auctions_per_shill;
        if honest_auctions > 0 {
            if self.n_honest_sellers == 0 {
                return Err(infeasible("unshilled auctions need honest sellers"));
            }
            if honest_auctions.div_ceil(self.n_honest_sellers) > self.n_products {
                return Err(infeasible(
                    "too few products for the honest sellers' auctions",
                ));
            }
        }
        if self.durations.is_empty() || self.durations.iter().any(|d| !VALID_DURATIONS.contains(d))
        {
            return Err(infeasible(
                "durations must be a non-empty subset of 1, 3, 5, 7, 10",
            ));
        }
        let (o_lo, o_hi) = self.opening_price;
        let (i_lo, i_hi) = self.increment;
        if !(o_lo > 0.0 && o_lo <= o_hi && i_lo >= 0.05 && i_lo <= i_hi) {
            return Err(infeasible(
                "price ranges must be positive and ordered (min increment 0.05)",
            ));
        }
        prob("honest_repeat_p", self.honest_repeat_p)?;
        if self.max_bids_per_bidder == 0 {
            return Err(infeasible("max_bids_per_bidder must be positive"));
        }
        for (name, p) in [
            ("late_bid_rate", self.late_bid_rate),
            ("duplicate_rate", self.duplicate_rate),
            ("masked_rate", self.masked_rate),
            ("foreign_rate", self.foreign_rate),
            ("mismatch_rate", self.mismatch_rate),
        ] {
            prob(name, p)?;
        }
        if self.foreign_rate > 0.0 && foreign_codes(rates).is_empty() {
            return Err(infeasible("foreign_rate needs at least one non-USD rate"));
        }
        Ok(())
    }
}

fn foreign_codes(rates: &RateTable) -> Vec<(String, f64)> {
    rates
        .iter()
        .filter(|(c, _)| *c != "USD")
        .map(|(c, r)| (c.to_string(), r))
        .collect()
}

fn stream(seed: u64, n: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    rng
}

fn cents(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

struct Plan {
    seller: String,
    product: usize,
    shill: Option<usize>,
}

/// Assigns sellers, products and shills to auction slots.
fn plan(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Plan> {
    let mut slots: Vec<usize> = (0..cfg.n_auctions).collect();
    slots.shuffle(rng);
    let mut plans: Vec<Option<Plan>> = (0..cfg.n_auctions).map(|_| None).collect();

    let mut it = slots.into_iter();
    for j in 0..cfg.n_shills {
        let mut products: Vec<usize> = (0..cfg.n_products).collect();
        products.shuffle(rng);
        for &product in products.iter().take(cfg.auctions_per_shill) {
            let slot = it.next().expect("validated slot count");
            plans[slot] = Some(Plan {
                seller: format!("seller{j:03}"),
                product,
                shill: Some(j),
            });
        }
    }
    let mut used: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (k, slot) in it.enumerate() {
        let seller = cfg.n_shills + k % cfg.n_honest_sellers;
        let taken = used.entry(seller).or_default();
        let free: Vec<usize> = (0..cfg.n_products).filter(|p| !taken.contains(p)).collect();
        let product = *free.choose(rng).expect("validated product count");
        taken.insert(product);
        plans[slot] = Some(Plan {
            seller: format!("seller{seller:03}"),
            product,
            shill: None,
        });
    }
    plans
        .into_iter()
        .map(|p| p.expect("every slot planned"))
        .collect()
}

/// One generated bid before amounts are attached.
struct Draft {
    bidder: usize,
    secs: i64,
}

pub fn generate(cfg: &SynthConfig, rates: &RateTable) -> Result<SynthOutput, SynthError> {
    cfg.validate(rates)?;
    let mut rng = stream(cfg.seed, 0);

    // honest bidders are 0..n_honest, shills follow; ids are shuffled so they
    // carry no hint of the label
    let n_bidders = cfg.n_honest_bidders + cfg.n_shills;
    let mut ids: Vec<String> = (1..=n_bidders).map(|i| format!("u{i:05}")).collect();
    ids.shuffle(&mut rng);
    let plans = plan(cfg, &mut rng);
    let foreign = foreign_codes(rates);
    let profile = &cfg.shill;

    let mut records = Vec::new();
    for (idx, p) in plans.iter().enumerate() {
        let mut r = stream(cfg.seed, idx as u64 + 1);
        let duration = *cfg.durations.choose(&mut r).expect("validated durations");
        let d_secs = duration as i64 * 86_400;
        let start = cfg.first_start
            + Duration::seconds(r.gen_range(0..cfg.start_span_days.max(1) as i64 * 86_400));
        let opening = cents(r.gen_range(cfg.opening_price.0..=cfg.opening_price.1));

        let k = r.gen_range(cfg.honest_per_auction.0..=cfg.honest_per_auction.1);
        let honest = rand::seq::index::sample(&mut r, cfg.n_honest_bidders, k).into_vec();
        let mut drafts = Vec::new();
        for &h in &honest {
            let mut n = 1;
            while n < cfg.max_bids_per_bidder && r.gen_bool(cfg.honest_repeat_p) {
                n += 1;
            }
            for _ in 0..n {
                drafts.push(Draft {
                    bidder: h,
                    secs: r.gen_range(0..d_secs),
                });
            }
        }

        if let Some(j) = p.shill {
            let stop = (profile.stop_fraction * d_secs as f64).floor() as i64;
            let early = ((profile.early_bid_fraction * d_secs as f64).floor() as i64).max(1);
            // an honest bid after the shill falls silent guarantees an honest winner
            if profile.avoid_winning {
                let closer = *honest.choose(&mut r).expect("k >= 1");
                drafts.push(Draft {
                    bidder: closer,
                    secs: r.gen_range(stop + 1..d_secs.max(stop + 2)),
                });
            }
            let h = drafts.len() as f64;
            let share = profile.bid_share_target;
            let s = ((share * h / (1.0 - share)).ceil() as usize).max(1);
            let shill = cfg.n_honest_bidders + j;
            let first = r.gen_range(0..early);
            drafts.push(Draft {
                bidder: shill,
                secs: first,
            });
            for _ in 1..s {
                drafts.push(Draft {
                    bidder: shill,
                    secs: r.gen_range(first..stop.max(first + 1)),
                });
            }
        }

        drafts.sort_by_key(|d| d.secs);
        if r.gen_bool(cfg.late_bid_rate) {
            if let Some(last) = drafts.last_mut() {
                last.secs = d_secs + r.gen_range(1..=d_secs);
            }
        }

        let mut amount = opening;
        let amounts: Vec<f64> = drafts
            .iter()
            .map(|_| {
                amount = cents(amount + r.gen_range(cfg.increment.0..=cfg.increment.1));
                amount
            })
            .collect();
        let max_bid = *amounts.last().expect("at least one bid");

        let (code, rate) = if !foreign.is_empty() && r.gen_bool(cfg.foreign_rate) {
            foreign.choose(&mut r).cloned().expect("non-empty")
        } else {
            ("USD".to_string(), 1.0)
        };
        let local = |usd: f64| if rate == 1.0 { usd } else { cents(usd / rate) };

        let masked = r.gen_bool(cfg.masked_rate);
        let mismatch = r.gen_bool(cfg.mismatch_rate);
        let mut declared_n = drafts.len() as u32 + masked as u32;
        let mut declared_win = local(max_bid);
        if mismatch {
            declared_n += r.gen_range(1..=10);
            declared_win = cents(declared_win * 0.9);
        }

        let url = format!("https://www.example.com/p/{}", 1000 + p.product);
        let row = |bidder: String, secs: i64, usd: f64| {
            let at = start + Duration::seconds(secs);
            RawBidRecord {
                product_url: url.clone(),
                seller_id: p.seller.clone(),
                bidder_id: bidder,
                bid_amount: local(usd),
                bid_currency: code.clone(),
                bid_date: at.date(),
                bid_time: at.time(),
                auction_start_date: start.date(),
                auction_start_time: start.time(),
                duration_text: format!("{duration} {}", if duration == 1 { "Day" } else { "Days" }),
                opening_price: local(opening),
                declared_winning_price: declared_win,
                declared_n_bids: declared_n,
                extra_fields: BTreeMap::new(),
            }
        };

        // bid history pages list the newest bid first
        let mut rows = Vec::new();
        for (d, &amt) in drafts.iter().zip(&amounts).rev() {
            let rec = row(ids[d.bidder].clone(), d.secs, amt);
            if r.gen_bool(cfg.duplicate_rate) {
                rows.push(rec.clone());
            }
            rows.push(rec);
        }
        if masked {
            let at = r.gen_range(0..d_secs);
            rows.push(row("****".to_string(), at, opening));
        }
        records.extend(rows);
    }

    let mut truth = BTreeMap::new();
    let mut histories = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let label = if i < cfg.n_honest_bidders {
            Label::Honest
        } else {
            Label::Shill
        };
        truth.insert(id.clone(), label);
        let h = match label {
            Label::Honest => {
                let rating = if rng.gen_bool(0.15) {
                    0
                } else {
                    rng.gen_range(1..=2000)
                };
                RawHistoryRecord {
                    bidder_id: id.clone(),
                    buyer_rating: rating,
                    items_bid_on_30d: rng.gen_range(1..=20),
                    n_bid_retractions_30d: if rng.gen_bool(0.9) {
                        0
                    } else {
                        rng.gen_range(1..=3)
                    },
                    activity_with_seller_raw: format!("{}%", rng.gen_range(0..=100)),
                }
            }
            Label::Shill => RawHistoryRecord {
                bidder_id: id.clone(),
                buyer_rating: if profile.zero_rating {
                    0
                } else {
                    rng.gen_range(1..=50)
                },
                items_bid_on_30d: profile.items_30d,
                n_bid_retractions_30d: profile.retractions,
                activity_with_seller_raw: "100%".to_string(),
            },
        };
        histories.push(h);
    }
    histories.sort_by(|a, b| a.bidder_id.cmp(&b.bidder_id));

    let shills = (0..cfg.n_shills)
        .map(|j| InjectedShill {
            bidder_id: ids[cfg.n_honest_bidders + j].clone(),
            target_seller: format!("seller{j:03}"),
            profile: profile.clone(),
        })
        .collect();

    Ok(SynthOutput {
        records,
        histories,
        truth,
        shills,
    })
}

pub fn write_truth<W: std::io::Write>(
    truth: &BTreeMap<String, Label>,
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    w.write_record(["bidder_id", "label"])?;
    for (id, label) in truth {
        w.write_record([id.as_str(), &label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Bounds a shill's metrics must satisfy, implied by its profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ShillBounds {
    pub bidder_id: String,
    pub min_early_bidding: f64,
    pub min_last_bidding: f64,
    /// Per auction the bound is `bid_share_target - 1 / n_bids`.
    pub bid_share_target: f64,
    pub participations: usize,
    pub winning_ratio: Option<f64>,
    pub brbi: Option<f64>,
}

/// Derives each shill's bounds from its profile and the generated rows.
pub fn expected_metrics(out: &SynthOutput, p_min: usize) -> Vec<ShillBounds> {
    out.shills
        .iter()
        .map(|s| {
            let auctions: BTreeSet<(&str, &str)> = out
                .records
                .iter()
                .filter(|r| r.bidder_id == s.bidder_id)
                .map(|r| (r.seller_id.as_str(), r.product_url.as_str()))
                .collect();
            let participations = auctions.len();
            let p = &s.profile;
            let winning_ratio = p.avoid_winning.then_some({
                if participations >= p_min && participations > 0 {
                    1.0
                } else {
                    0.0
                }
            });
            let brbi = (p.zero_rating && p.items_30d >= 5).then_some(1.0);
            ShillBounds {
                bidder_id: s.bidder_id.clone(),
                min_early_bidding: 1.0 - p.early_bid_fraction,
                min_last_bidding: 1.0 - p.stop_fraction,
                bid_share_target: p.bid_share_target,
                participations,
                winning_ratio,
                brbi,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub bidder_id: String,
    pub auction_id: Option<u32>,
    pub metric: &'static str,
    pub value: f64,
    pub bound: f64,
}

/// Checks samples against shill bounds; `tol` absorbs output rounding.
pub fn check_bounds(
    bounds: &[ShillBounds],
    samples: &[SbSample<f64>],
    auctions: &[Auction],
    tol: f64,
) -> Vec<BoundViolation> {
    let n_bids: BTreeMap<u32, u32> = auctions.iter().map(|a| (a.auction_id, a.n_bids)).collect();
    let mut out = Vec::new();
    for b in bounds {
        let mine: Vec<&SbSample<f64>> = samples
            .iter()
            .filter(|s| s.bidder_id == b.bidder_id)
            .collect();
        if mine.len() != b.participations {
            out.push(BoundViolation {
                bidder_id: b.bidder_id.clone(),
                auction_id: None,
                metric: "participations",
                value: mine.len() as f64,
                bound: b.participations as f64,
            });
        }
        for s in mine {
            let mut at_least = |metric, value: f64, bound: f64| {
                if value < bound - tol {
                    out.push(BoundViolation {
                        bidder_id: b.bidder_id.clone(),
                        auction_id: Some(s.auction_id),
                        metric,
                        value,
                        bound,
                    });
                }
            };
            at_least("early_bidding", s.early_bidding, b.min_early_bidding);
            at_least("last_bidding", s.last_bidding, b.min_last_bidding);
            let n = n_bids.get(&s.auction_id).copied().unwrap_or(1).max(1) as f64;
            at_least(
                "bidding_ratio",
                s.bidding_ratio,
                b.bid_share_target - 1.0 / n,
            );
            for (metric, expected, value) in [
                ("winning_ratio", b.winning_ratio, s.winning_ratio),
                ("brbi", b.brbi, s.brbi),
            ] {
                if let Some(e) = expected {
                    if (value - e).abs() > tol {
                        out.push(BoundViolation {
                            bidder_id: b.bidder_id.clone(),
                            auction_id: Some(s.auction_id),
                            metric,
                            value,
                            bound: e,
                        });
                    }
                }
            }
        }
    }
    out
}
