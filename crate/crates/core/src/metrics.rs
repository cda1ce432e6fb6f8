//! Shill-bidding pattern scores for every (auction, bidder) participation.
//!
//! Each score reads "higher is more suspicious". Early and last bidding are
//! left unclamped so that out-of-window bid times stay visible to the filter
//! stage; the other seven are always in [0, 1].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Float;
use thiserror::Error;

use crate::preprocess::{Auction, BidderHistory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("{field} must be non-negative, got {value}")]
    Negative { field: &'static str, value: i64 },
    #[error("activity with seller must be in [0, 1], got {0}")]
    ActivityOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Low,
    Medium,
    High,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weight::Low => "Low",
            Weight::Medium => "Medium",
            Weight::High => "High",
        })
    }
}

/// The nine features of a sample, in output column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    OpeningPrice,
    EarlyBidding,
    LastBidding,
    BiddingRatio,
    AuctionBids,
    BuyerTendency,
    WinningRatio,
    Brbi,
    BidRetraction,
}

impl Feature {
    pub const ALL: [Feature; 9] = [
        Feature::OpeningPrice,
        Feature::EarlyBidding,
        Feature::LastBidding,
        Feature::BiddingRatio,
        Feature::AuctionBids,
        Feature::BuyerTendency,
        Feature::WinningRatio,
        Feature::Brbi,
        Feature::BidRetraction,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Feature::OpeningPrice => "opening_price_m",
            Feature::EarlyBidding => "early_bidding",
            Feature::LastBidding => "last_bidding",
            Feature::BiddingRatio => "bidding_ratio",
            Feature::AuctionBids => "auction_bids",
            Feature::BuyerTendency => "buyer_tendency",
            Feature::WinningRatio => "winning_ratio",
            Feature::Brbi => "brbi",
            Feature::BidRetraction => "bid_retraction",
        }
    }

    pub fn weight(self) -> Weight {
        match self {
            Feature::OpeningPrice
            | Feature::EarlyBidding
            | Feature::AuctionBids
            | Feature::Brbi => Weight::Low,
            Feature::LastBidding
            | Feature::BiddingRatio
            | Feature::BuyerTendency
            | Feature::BidRetraction => Weight::Medium,
            Feature::WinningRatio => Weight::High,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

/// One training row: an auction, a bidder and the nine scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SbSample<T> {
    pub auction_id: u32,
    pub bidder_id: String,
    pub opening_price_m: T,
    pub early_bidding: T,
    pub last_bidding: T,
    pub bidding_ratio: T,
    pub auction_bids: T,
    pub buyer_tendency: T,
    pub winning_ratio: T,
    pub brbi: T,
    pub bid_retraction: T,
}

impl<T: Copy> SbSample<T> {
    pub fn from_features(auction_id: u32, bidder_id: impl Into<String>, f: [T; 9]) -> Self {
        Self {
            auction_id,
            bidder_id: bidder_id.into(),
            opening_price_m: f[0],
            early_bidding: f[1],
            last_bidding: f[2],
            bidding_ratio: f[3],
            auction_bids: f[4],
            buyer_tendency: f[5],
            winning_ratio: f[6],
            brbi: f[7],
            bid_retraction: f[8],
        }
    }

    pub fn features(&self) -> [T; 9] {
        [
            self.opening_price_m,
            self.early_bidding,
            self.last_bidding,
            self.bidding_ratio,
            self.auction_bids,
            self.buyer_tendency,
            self.winning_ratio,
            self.brbi,
            self.bid_retraction,
        ]
    }

    pub fn get(&self, f: Feature) -> T {
        self.features()[f.index()]
    }

    pub fn set(&mut self, f: Feature, v: T) {
        let slot = match f {
            Feature::OpeningPrice => &mut self.opening_price_m,
            Feature::EarlyBidding => &mut self.early_bidding,
            Feature::LastBidding => &mut self.last_bidding,
            Feature::BiddingRatio => &mut self.bidding_ratio,
            Feature::AuctionBids => &mut self.auction_bids,
            Feature::BuyerTendency => &mut self.buyer_tendency,
            Feature::WinningRatio => &mut self.winning_ratio,
            Feature::Brbi => &mut self.brbi,
            Feature::BidRetraction => &mut self.bid_retraction,
        };
        *slot = v;
    }
}

fn lit<T: Float>(x: f64) -> T {
    T::from(x).expect("float literal fits the scalar type")
}

fn clamp01<T: Float>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// Low opening prices relative to a reference price score high.
pub fn opening_price_metric<T: Float>(opening_price: T, ref_price: T) -> T {
    if ref_price <= T::zero() {
        return T::zero();
    }
    clamp01(T::one() - opening_price / ref_price)
}

/// `1 - t_first / duration`, unclamped.
pub fn early_bidding<T: Float>(first_bid_time: T, duration_days: T) -> T {
    T::one() - first_bid_time / duration_days
}

/// `1 - t_last / duration`, unclamped.
pub fn last_bidding<T: Float>(last_bid_time: T, duration_days: T) -> T {
    T::one() - last_bid_time / duration_days
}

pub fn bidding_ratio<T: Float>(bidder_bids: usize, auction_bids: usize) -> T {
    if auction_bids == 0 {
        return T::zero();
    }
    lit::<T>(bidder_bids as f64) / lit(auction_bids as f64)
}

/// Scores an auction that draws more bids than its concurrent peers.
/// `concurrent_mean` is `None` when the auction has no concurrent peers.
pub fn auction_bids<T: Float>(n_bids: usize, concurrent_mean: Option<T>) -> T {
    match concurrent_mean {
        Some(m) if n_bids > 0 => clamp01(T::one() - m / lit(n_bids as f64)),
        _ => T::zero(),
    }
}

pub fn buyer_tendency<T: Float>(auctions_with_seller: usize, auctions_total: usize) -> T {
    if auctions_total == 0 {
        return T::zero();
    }
    lit::<T>(auctions_with_seller as f64) / lit(auctions_total as f64)
}

/// `1 - wins / participations`, or 0 below `p_min` participations.
pub fn winning_ratio<T: Float>(participations: usize, wins: usize, p_min: usize) -> T {
    if participations == 0 || participations < p_min {
        return T::zero();
    }
    T::one() - lit::<T>(wins as f64) / lit(participations as f64)
}

/// Buyer rating relative to the number of items bid on in the last 30 days.
///
/// A zero-rated bidder active on five or more items scores 1; a rated bidder
/// scores `rating / items` while the rating is below the item count.
pub fn brbi<T: Float>(buyer_rating: i64, items_bid_on_30d: i64) -> Result<T, MetricError> {
    if buyer_rating < 0 {
        return Err(MetricError::Negative {
            field: "buyer_rating",
            value: buyer_rating,
        });
    }
    if items_bid_on_30d < 0 {
        return Err(MetricError::Negative {
            field: "items_bid_on_30d",
            value: items_bid_on_30d,
        });
    }
    let mut score = T::zero();
    if buyer_rating == 0 {
        if items_bid_on_30d >= 5 {
            score = T::one();
        }
    } else if buyer_rating < items_bid_on_30d {
        score = lit::<T>(buyer_rating as f64) / lit(items_bid_on_30d as f64);
    }
    Ok(score)
}

/// Bid retraction combined with the bidder's activity share with the seller.
///
/// `default` is the score when neither rule fires, normally 0.5.
pub fn bid_retraction<T: Float>(
    n_retractions: i64,
    activity_with_seller: T,
    default: T,
) -> Result<T, MetricError> {
    if n_retractions < 0 {
        return Err(MetricError::Negative {
            field: "n_bid_retractions_30d",
            value: n_retractions,
        });
    }
    if !(activity_with_seller >= T::zero() && activity_with_seller <= T::one()) {
        return Err(MetricError::ActivityOutOfRange(
            activity_with_seller.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let mut score = default;
    if n_retractions >= 1 && activity_with_seller == T::one() {
        score = T::one();
    } else if n_retractions >= 1 && activity_with_seller >= lit(0.7) {
        score = lit(0.5);
    }
    Ok(score)
}

/// How the opening-price metric's reference price is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferencePrice<T> {
    DatasetMeanWinning,
    Fixed(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig<T> {
    /// Minimum participations before the winning ratio is scored.
    pub p_min: usize,
    /// Bid-retraction score when no rule fires, also used for bidders without history.
    pub br_default: T,
    /// BRBI for bidders without history.
    pub brbi_default: T,
    pub reference: ReferencePrice<T>,
    /// Reference price per product URL, overriding `reference`.
    pub product_reference: BTreeMap<String, T>,
}

impl<T: Float> Default for MetricConfig<T> {
    fn default() -> Self {
        Self {
            p_min: 4,
            br_default: lit(0.5),
            brbi_default: T::zero(),
            reference: ReferencePrice::DatasetMeanWinning,
            product_reference: BTreeMap::new(),
        }
    }
}

/// Cross-auction quantities, built once from the full auction list.
#[derive(Debug, Clone)]
pub struct DatasetContext<'a> {
    pub auctions: &'a [Auction],
    /// Auction indices each bidder took part in, ascending.
    pub participations: BTreeMap<String, Vec<usize>>,
    /// Distinct auctions per (bidder, seller).
    pub seller_counts: HashMap<(String, String), usize>,
    pub wins: BTreeMap<String, usize>,
    /// Indices of concurrent auctions, per auction index.
    pub concurrent: Vec<Vec<usize>>,
    pub mean_winning_price: f64,
}

impl<'a> DatasetContext<'a> {
    pub fn new(auctions: &'a [Auction]) -> Self {
        let mut participations: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut seller_counts: HashMap<(String, String), usize> = HashMap::new();
        let mut wins: BTreeMap<String, usize> = BTreeMap::new();
        for (i, a) in auctions.iter().enumerate() {
            let bidders: BTreeSet<&str> = a.bids.iter().map(|b| b.bidder_id.as_str()).collect();
            for b in bidders {
                participations.entry(b.to_string()).or_default().push(i);
                *seller_counts
                    .entry((b.to_string(), a.seller_id.clone()))
                    .or_default() += 1;
            }
            if let Some(w) = a.winner() {
                *wins.entry(w.to_string()).or_default() += 1;
            }
        }

        let mut by_product: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, a) in auctions.iter().enumerate() {
            by_product
                .entry(a.product_url.as_str())
                .or_default()
                .push(i);
        }
        let mut concurrent = vec![Vec::new(); auctions.len()];
        for group in by_product.values() {
            for &i in group {
                let (s, e) = (auctions[i].start, auctions[i].end());
                concurrent[i] = group
                    .iter()
                    .copied()
                    .filter(|&j| j != i && auctions[j].start < e && s < auctions[j].end())
                    .collect();
            }
        }

        let mean_winning_price = if auctions.is_empty() {
            0.0
        } else {
            auctions.iter().map(|a| a.winning_price_usd).sum::<f64>() / auctions.len() as f64
        };

        Self {
            auctions,
            participations,
            seller_counts,
            wins,
            concurrent,
            mean_winning_price,
        }
    }

    pub fn participation_count(&self, bidder: &str) -> usize {
        self.participations.get(bidder).map_or(0, Vec::len)
    }

    pub fn win_count(&self, bidder: &str) -> usize {
        self.wins.get(bidder).copied().unwrap_or(0)
    }

    pub fn auctions_with_seller(&self, bidder: &str, seller: &str) -> usize {
        self.seller_counts
            .get(&(bidder.to_string(), seller.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// Mean bid count over the auctions concurrent with auction `idx`.
    pub fn concurrent_mean_bids(&self, idx: usize) -> Option<f64> {
        let peers = &self.concurrent[idx];
        if peers.is_empty() {
            return None;
        }
        let total: f64 = peers.iter().map(|&j| self.auctions[j].n_bids as f64).sum();
        Some(total / peers.len() as f64)
    }
}

/// Scores every (auction, participating bidder) pair, sorted by
/// `(auction_id, bidder_id)`.
pub fn build_samples<T: Float>(
    auctions: &[Auction],
    histories: &BTreeMap<String, BidderHistory>,
    cfg: &MetricConfig<T>,
) -> Vec<SbSample<T>> {
    let ctx = DatasetContext::new(auctions);
    let dataset_ref = match cfg.reference {
        ReferencePrice::DatasetMeanWinning => lit(ctx.mean_winning_price),
        ReferencePrice::Fixed(v) => v,
    };

    let mut samples = Vec::new();
    for (idx, a) in auctions.iter().enumerate() {
        let ref_price = cfg
            .product_reference
            .get(&a.product_url)
            .copied()
            .unwrap_or(dataset_ref);
        let opening = opening_price_metric(lit(a.opening_price_usd), ref_price);
        let crowd = auction_bids(a.n_bids as usize, ctx.concurrent_mean_bids(idx).map(lit));
        let duration: T = lit(a.duration_days as f64);

        // bids are time-ordered, so first/last per bidder fall out of one pass
        let mut per_bidder: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
        for b in &a.bids {
            per_bidder
                .entry(b.bidder_id.as_str())
                .and_modify(|e| {
                    e.1 = b.bid_time;
                    e.2 += 1;
                })
                .or_insert((b.bid_time, b.bid_time, 1));
        }

        for (bidder, (first, last, count)) in per_bidder {
            let (brbi_v, br_v) = match histories.get(bidder) {
                Some(h) => (
                    brbi(clamp_i64(h.buyer_rating), clamp_i64(h.items_bid_on_30d))
                        .unwrap_or(cfg.brbi_default),
                    bid_retraction(
                        clamp_i64(h.n_bid_retractions_30d),
                        lit(h.activity_with_seller),
                        cfg.br_default,
                    )
                    .unwrap_or(cfg.br_default),
                ),
                None => (cfg.brbi_default, cfg.br_default),
            };
            samples.push(SbSample {
                auction_id: a.auction_id,
                bidder_id: bidder.to_string(),
                opening_price_m: opening,
                early_bidding: early_bidding(lit(first), duration),
                last_bidding: last_bidding(lit(last), duration),
                bidding_ratio: bidding_ratio(count, a.n_bids as usize),
                auction_bids: crowd,
                buyer_tendency: buyer_tendency(
                    ctx.auctions_with_seller(bidder, &a.seller_id),
                    ctx.participation_count(bidder),
                ),
                winning_ratio: winning_ratio(
                    ctx.participation_count(bidder),
                    ctx.win_count(bidder),
                    cfg.p_min,
                ),
                brbi: brbi_v,
                bid_retraction: br_v,
            });
        }
    }
    samples.sort_by(|x, y| {
        x.auction_id
            .cmp(&y.auction_id)
            .then_with(|| x.bidder_id.cmp(&y.bidder_id))
    });
    samples
}

fn clamp_i64(v: u64) -> i64 {
    i64::try_from(v).unwrap_or(i64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::auction;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn opening_price_examples() {
        assert_eq!(opening_price_metric(641.24, 641.24), 0.0);
        assert_eq!(opening_price_metric(800.0, 641.24), 0.0);
        let v = opening_price_metric(141.33_f64, 641.24);
        assert!(close(v, 0.7796, 1e-3), "{v}");
    }

    #[test]
    fn early_and_last_bidding_examples() {
        assert_eq!(early_bidding(0.0, 7.0), 1.0);
        assert_eq!(early_bidding(7.0, 7.0), 0.0);
        assert!(close(early_bidding(1.2862, 7.0), 0.8163, 1e-3));
        assert_eq!(last_bidding(7.0, 7.0), 0.0);
        assert_eq!(last_bidding(0.0, 7.0), 1.0);
        assert!(close(last_bidding(6.3, 7.0), 0.1, 1e-9));
        // out-of-window times are not clamped
        assert!(last_bidding(9.0_f64, 7.0) < 0.0);
        assert!(early_bidding(-1.0_f64, 7.0) > 1.0);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(bidding_ratio::<f64>(4, 4), 1.0);
        assert_eq!(bidding_ratio::<f64>(3, 12), 0.25);
        assert_eq!(auction_bids::<f64>(50, Some(50.0)), 0.0);
        assert_eq!(auction_bids::<f64>(100, Some(50.0)), 0.5);
        assert_eq!(auction_bids::<f64>(10, Some(50.0)), 0.0);
        assert_eq!(auction_bids::<f64>(100, None), 0.0);
        assert_eq!(buyer_tendency::<f64>(4, 4), 1.0);
        assert_eq!(buyer_tendency::<f64>(3, 10), 0.3);
        assert_eq!(buyer_tendency::<f64>(0, 10), 0.0);
        assert!(close(winning_ratio::<f64>(10, 1, 4), 0.9, 1e-12));
        assert_eq!(winning_ratio::<f64>(2, 0, 4), 0.0);
        assert_eq!(winning_ratio::<f64>(6, 6, 4), 0.0);
    }

    #[test]
    fn brbi_reference_rows() {
        assert_eq!(brbi::<f64>(0, 1).unwrap(), 0.0);
        assert_eq!(brbi::<f64>(0, 8).unwrap(), 1.0);
        assert_eq!(brbi::<f64>(2715, 1).unwrap(), 0.0);
        assert!(close(brbi::<f64>(7, 30).unwrap(), 0.23333, 1e-5));
        assert_eq!(brbi::<f64>(3, 0).unwrap(), 0.0);
        assert_eq!(brbi::<f64>(5, 5).unwrap(), 0.0);
        assert!(brbi::<f64>(-1, 3).is_err());
        assert!(brbi::<f64>(1, -3).is_err());
    }

    #[test]
    fn brbi_in_f32() {
        assert!((brbi::<f32>(7, 30).unwrap() - 0.23333).abs() < 1e-5);
    }

    #[test]
    fn bid_retraction_rules() {
        assert_eq!(bid_retraction(0, 0.9, 0.5).unwrap(), 0.5);
        assert_eq!(bid_retraction(2, 1.0, 0.5).unwrap(), 1.0);
        assert_eq!(bid_retraction(1, 0.8, 0.5).unwrap(), 0.5);
        assert_eq!(bid_retraction(1, 0.3, 0.5).unwrap(), 0.5);
        // non-default switch
        assert_eq!(bid_retraction(0, 0.9, 0.0).unwrap(), 0.0);
        assert_eq!(bid_retraction(1, 0.8, 0.0).unwrap(), 0.5);
        assert!(bid_retraction(1, 1.2, 0.5).is_err());
        assert!(bid_retraction(1, -0.1, 0.5).is_err());
        assert!(bid_retraction(-1, 0.5, 0.5).is_err());
    }

    #[test]
    fn weights_are_fixed() {
        use Weight::*;
        let got: Vec<Weight> = Feature::ALL.iter().map(|f| f.weight()).collect();
        assert_eq!(
            got,
            [Low, Low, Medium, Medium, Low, Medium, High, Low, Medium]
        );
    }

    #[test]
    fn samples_cover_every_participation() {
        let auctions = vec![
            auction(
                1,
                "s1",
                "u",
                1,
                &[
                    ("a", 0.1, 110.0),
                    ("b", 1.0, 120.0),
                    ("c", 2.0, 130.0),
                    ("a", 3.0, 140.0),
                ],
            ),
            auction(2, "s2", "u", 20, &[("a", 0.5, 110.0), ("d", 6.0, 150.0)]),
        ];
        let samples: Vec<SbSample<f64>> =
            build_samples(&auctions, &BTreeMap::new(), &MetricConfig::default());
        assert_eq!(samples.len(), 5);
        let keys: Vec<(u32, &str)> = samples
            .iter()
            .map(|s| (s.auction_id, s.bidder_id.as_str()))
            .collect();
        assert_eq!(keys, [(1, "a"), (1, "b"), (1, "c"), (2, "a"), (2, "d")]);
        let a1 = &samples[0];
        assert_eq!(a1.bidding_ratio, 0.5);
        assert!(close(a1.early_bidding, 1.0 - 0.1 / 7.0, 1e-12));
        assert!(close(a1.last_bidding, 1.0 - 3.0 / 7.0, 1e-12));
        assert_eq!(a1.buyer_tendency, 0.5);
        assert_eq!(samples[3].buyer_tendency, 0.5);
        assert_eq!(a1.brbi, 0.0);
        assert_eq!(a1.bid_retraction, 0.5);
        // windows do not overlap, so no concurrent auctions
        assert_eq!(a1.auction_bids, 0.0);
        let sum: f64 = samples
            .iter()
            .filter(|s| s.auction_id == 1)
            .map(|s| s.bidding_ratio)
            .sum();
        assert!(close(sum, 1.0, 1e-9));
    }

    #[test]
    fn concurrency_uses_overlapping_windows_of_the_same_product() {
        let auctions = vec![
            auction(
                1,
                "s1",
                "u",
                1,
                &[
                    ("a", 0.1, 110.0),
                    ("b", 1.0, 120.0),
                    ("c", 2.0, 130.0),
                    ("a", 3.0, 140.0),
                ],
            ),
            auction(2, "s2", "u", 3, &[("a", 0.5, 110.0), ("d", 6.0, 150.0)]),
            auction(3, "s2", "other", 3, &[("e", 0.5, 110.0)]),
        ];
        let ctx = DatasetContext::new(&auctions);
        assert_eq!(ctx.concurrent, vec![vec![1], vec![0], vec![]]);
        let samples: Vec<SbSample<f64>> =
            build_samples(&auctions, &BTreeMap::new(), &MetricConfig::default());
        assert_eq!(samples[0].auction_bids, 0.5);
        assert_eq!(samples[3].auction_bids, 0.0);
    }

    #[test]
    fn histories_and_reference_price_feed_samples() {
        let auctions = vec![auction(
            1,
            "s1",
            "u",
            1,
            &[("z***c", 0.1, 110.0), ("w***w", 1.0, 200.0)],
        )];
        let h = |id: &str, r, i, n, act| BidderHistory {
            bidder_id: id.to_string(),
            buyer_rating: r,
            items_bid_on_30d: i,
            n_bid_retractions_30d: n,
            activity_with_seller: act,
        };
        let histories: BTreeMap<_, _> = [
            ("z***c".to_string(), h("z***c", 0, 8, 2, 1.0)),
            ("w***w".to_string(), h("w***w", 7, 30, 0, 0.2)),
        ]
        .into();
        let mut cfg = MetricConfig::default();
        cfg.reference = ReferencePrice::Fixed(400.0);
        let s: Vec<SbSample<f64>> = build_samples(&auctions, &histories, &cfg);
        assert_eq!(s[1].bidder_id, "z***c");
        assert_eq!(s[1].brbi, 1.0);
        assert_eq!(s[1].bid_retraction, 1.0);
        assert!(close(s[0].brbi, 0.23333, 1e-5));
        assert_eq!(s[0].opening_price_m, 0.75);
        cfg.product_reference.insert("u".into(), 200.0);
        let s: Vec<SbSample<f64>> = build_samples(&auctions, &histories, &cfg);
        assert_eq!(s[0].opening_price_m, 0.5);
    }

    #[test]
    fn winner_gets_counted() {
        let auctions: Vec<Auction> = (1..=5)
            .map(|i| auction(i, "s", "u", i * 10, &[("x", 0.1, 110.0), ("y", 1.0, 120.0)]))
            .collect();
        let s: Vec<SbSample<f64>> =
            build_samples(&auctions, &BTreeMap::new(), &MetricConfig::default());
        let x = s.iter().find(|s| s.bidder_id == "x").unwrap();
        let y = s.iter().find(|s| s.bidder_id == "y").unwrap();
        assert_eq!(x.winning_ratio, 1.0);
        assert_eq!(y.winning_ratio, 0.0);
    }
}
