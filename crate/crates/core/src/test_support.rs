//! Fixture builders shared by unit tests.

use chrono::NaiveDate;

use crate::preprocess::{Auction, CleanBid};

/// A 7-day auction starting `day - 1` days after 2017-04-01, with `(bidder, time, amount)` bids.
pub(crate) fn auction(
    id: u32,
    seller: &str,
    url: &str,
    day: u32,
    bids: &[(&str, f64, f64)],
) -> Auction {
    let start = NaiveDate::from_ymd_opt(2017, 4, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
        + chrono::Duration::days(day as i64 - 1);
    let bids: Vec<CleanBid> = bids
        .iter()
        .map(|&(b, t, amt)| CleanBid {
            auction_id: id,
            bidder_id: b.into(),
            seller_id: seller.into(),
            bid_time: t,
            bid_amount_usd: amt,
            duration_days: 7,
        })
        .collect();
    Auction {
        auction_id: id,
        seller_id: seller.into(),
        product_url: url.into(),
        start,
        duration_days: 7,
        opening_price_usd: 100.0,
        winning_price_usd: bids.iter().map(|b| b.bid_amount_usd).fold(0.0, f64::max),
        n_bids: bids.len() as u32,
        bids,
    }
}
