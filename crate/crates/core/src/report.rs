//! Dataset statistics reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ingest::RawBidRecord;
use crate::preprocess::Auction;

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub n_auction_ids: usize,
    pub n_bidder_ids: usize,
    pub n_records: usize,
    pub n_attributes: usize,
    /// Only known once auctions are repaired.
    pub avg_winning_price: Option<f64>,
    pub avg_starting_price: Option<f64>,
    pub avg_n_bids: Option<f64>,
    /// Non-USD record counts per currency code.
    pub foreign_currency: BTreeMap<String, usize>,
}

impl StatsReport {
    /// Raw-feed statistics; auctions are distinct `(seller, product URL)` pairs.
    pub fn from_raw(records: &[RawBidRecord], n_attributes: usize) -> Self {
        let auctions: BTreeSet<(&str, &str)> = records
            .iter()
            .map(|r| (r.seller_id.as_str(), r.product_url.as_str()))
            .collect();
        let bidders: BTreeSet<&str> = records.iter().map(|r| r.bidder_id.as_str()).collect();
        let mut foreign = BTreeMap::new();
        for r in records.iter().filter(|r| r.bid_currency != "USD") {
            *foreign.entry(r.bid_currency.clone()).or_default() += 1;
        }
        Self {
            n_auction_ids: auctions.len(),
            n_bidder_ids: bidders.len(),
            n_records: records.len(),
            n_attributes,
            avg_winning_price: None,
            avg_starting_price: None,
            avg_n_bids: None,
            foreign_currency: foreign,
        }
    }

    /// Statistics of the preprocessed dataset (nine attributes, all USD).
    pub fn from_auctions(auctions: &[Auction]) -> Self {
        let bidders: BTreeSet<&str> = auctions
            .iter()
            .flat_map(|a| a.bids.iter().map(|b| b.bidder_id.as_str()))
            .collect();
        let n = auctions.len();
        let mean = |f: &dyn Fn(&Auction) -> f64| {
            (n > 0).then(|| auctions.iter().map(f).sum::<f64>() / n as f64)
        };
        Self {
            n_auction_ids: n,
            n_bidder_ids: bidders.len(),
            n_records: auctions.iter().map(|a| a.bids.len()).sum(),
            n_attributes: 9,
            avg_winning_price: mean(&|a| a.winning_price_usd),
            avg_starting_price: mean(&|a| a.opening_price_usd),
            avg_n_bids: mean(&|a| a.n_bids as f64),
            foreign_currency: BTreeMap::new(),
        }
    }

    pub fn foreign_total(&self) -> usize {
        self.foreign_currency.values().sum()
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Number of Auction IDs: {}", self.n_auction_ids)?;
        writeln!(f, "Number of Bidder IDs: {}", self.n_bidder_ids)?;
        writeln!(f, "Number of Records: {}", self.n_records)?;
        writeln!(f, "Number of Attributes: {}", self.n_attributes)?;
        if let Some(v) = self.avg_winning_price {
            writeln!(f, "Average of Winning Price: {v:.2}")?;
        }
        if let Some(v) = self.avg_starting_price {
            writeln!(f, "Average of Starting Price: {v:.2}")?;
        }
        if let Some(v) = self.avg_n_bids {
            writeln!(f, "Average Number of Bids: {v:.2}")?;
        }
        if !self.foreign_currency.is_empty() {
            let parts: Vec<String> = self
                .foreign_currency
                .iter()
                .map(|(c, n)| format!("{n} {c}"))
                .collect();
            writeln!(
                f,
                "Number of Records with Foreign Currency: {} ({})",
                self.foreign_total(),
                parts.join(", ")
            )?;
        }
        Ok(())
    }
}
