//! Flat `key = value` pipeline configuration.
//!
//! One setting per line; `#` starts a comment line; blank lines are ignored.
//! A line splits at its first `=`, so keys never contain `=`. Keys are
//! dotted (`rates.GBP = 1.28`). Relative paths resolve against the
//! directory holding the config file. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use thiserror::Error;

use crate::ingest::{parse_date, AuctionField, AuctionSchema, HistoryField, HistorySchema};
use crate::metrics::{MetricConfig, ReferencePrice};
use crate::preprocess::RateTable;
use crate::synth::SynthConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` set twice")]
    Repeated { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Raw auction bid rows; when absent, `run` generates synthetic input.
    pub auctions: Option<PathBuf>,
    pub histories: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub delimiter: u8,
    pub auction_schema: AuctionSchema,
    pub history_schema: HistorySchema,
    pub rates: RateTable,
    pub iqr_k: f64,
    pub p_min: usize,
    pub br_default: f64,
    pub reference: ReferencePrice<f64>,
    pub product_reference: BTreeMap<String, f64>,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            auctions: None,
            histories: None,
            out_dir: PathBuf::from("out"),
            delimiter: b',',
            auction_schema: AuctionSchema::default(),
            history_schema: HistorySchema::default(),
            rates: RateTable::default(),
            iqr_k: 1.5,
            p_min: 4,
            br_default: 0.5,
            reference: ReferencePrice::DatasetMeanWinning,
            product_reference: BTreeMap::new(),
            synth: SynthConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if seen.insert(key.to_string(), line).is_some() {
                return Err(ConfigError::Repeated {
                    line,
                    key: key.into(),
                });
            }
            cfg.apply(key, value, base).map_err(|e| e.at(line, key))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str, base: &Path) -> Result<(), KeyError> {
        let path = || base.join(value);
        let s = &mut self.synth;
        match key {
            "input.auctions" => self.auctions = Some(path()),
            "input.histories" => self.histories = Some(path()),
            "output.dir" => self.out_dir = path(),
            "delimiter" => self.delimiter = parse_delimiter(value)?,
            "iqr_k" => self.iqr_k = num(value)?,
            "p_min" => self.p_min = num(value)?,
            "br_default" => self.br_default = num(value)?,
            "reference_price" => {
                self.reference = if value.eq_ignore_ascii_case("mean") {
                    ReferencePrice::DatasetMeanWinning
                } else {
                    ReferencePrice::Fixed(num(value)?)
                }
            }
            "seed" => s.seed = num(value)?,
            "synth.n_auctions" => s.n_auctions = num(value)?,
            "synth.n_honest_bidders" => s.n_honest_bidders = num(value)?,
            "synth.n_shills" => s.n_shills = num(value)?,
            "synth.auctions_per_shill" => s.auctions_per_shill = num(value)?,
            "synth.n_honest_sellers" => s.n_honest_sellers = num(value)?,
            "synth.n_products" => s.n_products = num(value)?,
            "synth.durations" => {
                s.durations = value
                    .split(',')
                    .map(|d| num(d.trim()))
                    .collect::<Result<_, _>>()?
            }
            "synth.opening_price_min" => s.opening_price.0 = num(value)?,
            "synth.opening_price_max" => s.opening_price.1 = num(value)?,
            "synth.increment_min" => s.increment.0 = num(value)?,
            "synth.increment_max" => s.increment.1 = num(value)?,
            "synth.honest_per_auction_min" => s.honest_per_auction.0 = num(value)?,
            "synth.honest_per_auction_max" => s.honest_per_auction.1 = num(value)?,
            "synth.honest_repeat_p" => s.honest_repeat_p = num(value)?,
            "synth.max_bids_per_bidder" => s.max_bids_per_bidder = num(value)?,
            "synth.first_start" => s.first_start = timestamp(value)?,
            "synth.start_span_days" => s.start_span_days = num(value)?,
            "synth.late_bid_rate" => s.late_bid_rate = num(value)?,
            "synth.duplicate_rate" => s.duplicate_rate = num(value)?,
            "synth.masked_rate" => s.masked_rate = num(value)?,
            "synth.foreign_rate" => s.foreign_rate = num(value)?,
            "synth.mismatch_rate" => s.mismatch_rate = num(value)?,
            "synth.shill.early_bid_fraction" => s.shill.early_bid_fraction = num(value)?,
            "synth.shill.stop_fraction" => s.shill.stop_fraction = num(value)?,
            "synth.shill.bid_share_target" => s.shill.bid_share_target = num(value)?,
            "synth.shill.avoid_winning" => s.shill.avoid_winning = num(value)?,
            "synth.shill.zero_rating" => s.shill.zero_rating = num(value)?,
            "synth.shill.items_30d" => s.shill.items_30d = num(value)?,
            "synth.shill.retractions" => s.shill.retractions = num(value)?,
            _ => {
                if let Some(code) = key.strip_prefix("rates.") {
                    self.rates
                        .insert(code, num(value)?)
                        .map_err(|e| KeyError::Value(e.to_string()))?;
                } else if let Some(url) = key.strip_prefix("reference_price.product.") {
                    self.product_reference.insert(url.to_string(), num(value)?);
                } else if let Some(field) = key.strip_prefix("schema.auction.") {
                    let f = AuctionField::from_key(field).ok_or(KeyError::Unknown)?;
                    self.auction_schema.set(f, value);
                } else if let Some(field) = key.strip_prefix("schema.history.") {
                    let f = HistoryField::from_key(field).ok_or(KeyError::Unknown)?;
                    self.history_schema.set(f, value);
                } else {
                    return Err(KeyError::Unknown);
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.iqr_k.is_finite() && self.iqr_k > 0.0) {
            return bad("iqr_k must be positive");
        }
        if self.p_min == 0 {
            return bad("p_min must be positive");
        }
        if !(0.0..=1.0).contains(&self.br_default) {
            return bad("br_default must be in [0, 1]");
        }
        if let ReferencePrice::Fixed(v) = self.reference {
            if !(v.is_finite() && v > 0.0) {
                return bad("reference_price must be positive");
            }
        }
        if self
            .product_reference
            .values()
            .any(|&v| !(v.is_finite() && v > 0.0))
        {
            return bad("per-product reference prices must be positive");
        }
        Ok(())
    }

    pub fn metric_config(&self) -> MetricConfig<f64> {
        MetricConfig {
            p_min: self.p_min,
            br_default: self.br_default,
            brbi_default: 0.0,
            reference: self.reference.clone(),
            product_reference: self.product_reference.clone(),
        }
    }
}

enum KeyError {
    Unknown,
    Value(String),
}

impl KeyError {
    fn at(self, line: usize, key: &str) -> ConfigError {
        match self {
            KeyError::Unknown => ConfigError::UnknownKey {
                line,
                key: key.into(),
            },
            KeyError::Value(reason) => ConfigError::Value {
                line,
                key: key.into(),
                reason,
            },
        }
    }
}

fn num<T: std::str::FromStr>(value: &str) -> Result<T, KeyError> {
    value
        .parse()
        .map_err(|_| KeyError::Value(format!("cannot parse `{value}`")))
}

fn parse_delimiter(value: &str) -> Result<u8, KeyError> {
    match value {
        "tab" | "\\t" => Ok(b'\t'),
        "comma" => Ok(b','),
        "semicolon" => Ok(b';'),
        "pipe" => Ok(b'|'),
        v if v.len() == 1 && v.is_ascii() => Ok(v.as_bytes()[0]),
        _ => Err(KeyError::Value(
            "delimiter must be one ASCII character".into(),
        )),
    }
}

/// `YYYY-MM-DD` or `YYYY-MM-DD HH:MM:SS`.
fn timestamp(value: &str) -> Result<NaiveDateTime, KeyError> {
    if let Ok(ts) = NaiveDateTime::parse_from_str(value, "%Y-%m-%d %H:%M:%S") {
        return Ok(ts);
    }
    parse_date(value)
        .map(|d| d.and_time(chrono::NaiveTime::MIN))
        .map_err(KeyError::Value)
}
