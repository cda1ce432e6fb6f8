//! Delimited-text ingestion of auction bid rows and bidder-history rows.
//!
//! Rows that fail a type check are skipped and logged in a [`ParseReport`];
//! only I/O failures and missing mandatory columns abort a parse.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{NaiveDate, NaiveTime};
use thiserror::Error;

/// Currencies the auction feed is expected to carry.
pub const SUPPORTED_CURRENCIES: [&str; 4] = ["USD", "CAD", "GBP", "EUR"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing mandatory column `{column}` (field {field})")]
    MissingColumn { field: &'static str, column: String },
    #[error("input has no header row")]
    NoHeader,
}

/// One per-row problem found while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    /// 1-based data row number (the header is row 0).
    pub row: usize,
    pub field: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub defects: Vec<Defect>,
}

impl ParseReport {
    /// Number of distinct rows that were rejected.
    pub fn rows_rejected(&self) -> usize {
        self.defects
            .iter()
            .map(|d| d.row)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Writes the defects as `row_number,field,reason`.
    pub fn write_defects<W: Write>(&self, out: W, delimiter: u8) -> csv::Result<()> {
        write_defects(&self.defects, out, delimiter)
    }
}

pub fn write_defects<W: Write>(defects: &[Defect], out: W, delimiter: u8) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    w.write_record(["row_number", "field", "reason"])?;
    for d in defects {
        w.write_record([d.row.to_string().as_str(), &d.field, &d.reason])?;
    }
    w.flush()?;
    Ok(())
}

/// Typed fields of an auction bid row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuctionField {
    ProductUrl,
    SellerId,
    BidderId,
    BidAmount,
    BidCurrency,
    BidDate,
    BidTime,
    AuctionStartDate,
    AuctionStartTime,
    Duration,
    OpeningPrice,
    WinningPrice,
    NBids,
}

impl AuctionField {
    /// Canonical column order.
    pub const ALL: [AuctionField; 13] = [
        AuctionField::ProductUrl,
        AuctionField::SellerId,
        AuctionField::BidderId,
        AuctionField::BidAmount,
        AuctionField::BidCurrency,
        AuctionField::BidDate,
        AuctionField::BidTime,
        AuctionField::AuctionStartDate,
        AuctionField::AuctionStartTime,
        AuctionField::Duration,
        AuctionField::OpeningPrice,
        AuctionField::WinningPrice,
        AuctionField::NBids,
    ];

    /// Field key, also the default column header.
    pub fn key(self) -> &'static str {
        match self {
            AuctionField::ProductUrl => "product_url",
            AuctionField::SellerId => "seller_id",
            AuctionField::BidderId => "bidder_id",
            AuctionField::BidAmount => "bid_amount",
            AuctionField::BidCurrency => "bid_currency",
            AuctionField::BidDate => "bid_date",
            AuctionField::BidTime => "bid_time",
            AuctionField::AuctionStartDate => "auction_start_date",
            AuctionField::AuctionStartTime => "auction_start_time",
            AuctionField::Duration => "duration",
            AuctionField::OpeningPrice => "opening_price",
            AuctionField::WinningPrice => "winning_price",
            AuctionField::NBids => "n_bids",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.key() == key)
    }
}

impl fmt::Display for AuctionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HistoryField {
    BidderId,
    BuyerRating,
    ItemsBidOn30d,
    Retractions30d,
    ActivityWithSeller,
}

impl HistoryField {
    pub const ALL: [HistoryField; 5] = [
        HistoryField::BidderId,
        HistoryField::BuyerRating,
        HistoryField::ItemsBidOn30d,
        HistoryField::Retractions30d,
        HistoryField::ActivityWithSeller,
    ];

    pub fn key(self) -> &'static str {
        match self {
            HistoryField::BidderId => "bidder_id",
            HistoryField::BuyerRating => "buyer_rating",
            HistoryField::ItemsBidOn30d => "items_bid_on_30d",
            HistoryField::Retractions30d => "n_bid_retractions_30d",
            HistoryField::ActivityWithSeller => "activity_with_seller",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.key() == key)
    }
}

impl fmt::Display for HistoryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Maps each typed field to the column header that carries it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema<F: Ord> {
    columns: BTreeMap<F, String>,
}

pub type AuctionSchema = Schema<AuctionField>;
pub type HistorySchema = Schema<HistoryField>;

impl Default for AuctionSchema {
    fn default() -> Self {
        Self {
            columns: AuctionField::ALL
                .into_iter()
                .map(|f| (f, f.key().to_string()))
                .collect(),
        }
    }
}

impl Default for HistorySchema {
    fn default() -> Self {
        Self {
            columns: HistoryField::ALL
                .into_iter()
                .map(|f| (f, f.key().to_string()))
                .collect(),
        }
    }
}

impl<F: Ord + Copy> Schema<F> {
    pub fn set(&mut self, field: F, column: impl Into<String>) {
        self.columns.insert(field, column.into());
    }

    pub fn column(&self, field: F) -> &str {
        &self.columns[&field]
    }
}

/// One scraped bid row, before any cleaning.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBidRecord {
    pub product_url: String,
    pub seller_id: String,
    pub bidder_id: String,
    pub bid_amount: f64,
    pub bid_currency: String,
    pub bid_date: NaiveDate,
    pub bid_time: NaiveTime,
    pub auction_start_date: NaiveDate,
    pub auction_start_time: NaiveTime,
    pub duration_text: String,
    pub opening_price: f64,
    pub declared_winning_price: f64,
    pub declared_n_bids: u32,
    /// Columns outside the schema, carried opaquely and dropped at preprocessing.
    pub extra_fields: BTreeMap<String, String>,
}

impl RawBidRecord {
    /// The typed fields rendered in canonical column order.
    pub fn canonical_fields(&self) -> [String; 13] {
        [
            self.product_url.clone(),
            self.seller_id.clone(),
            self.bidder_id.clone(),
            self.bid_amount.to_string(),
            self.bid_currency.clone(),
            self.bid_date.format(DATE_FORMAT).to_string(),
            self.bid_time.format(TIME_FORMAT).to_string(),
            self.auction_start_date.format(DATE_FORMAT).to_string(),
            self.auction_start_time.format(TIME_FORMAT).to_string(),
            self.duration_text.clone(),
            self.opening_price.to_string(),
            self.declared_winning_price.to_string(),
            self.declared_n_bids.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawHistoryRecord {
    pub bidder_id: String,
    pub buyer_rating: u64,
    pub items_bid_on_30d: u64,
    pub n_bid_retractions_30d: u64,
    /// Percentage text such as `90%`; converted during preprocessing.
    pub activity_with_seller_raw: String,
}

pub const DATE_FORMAT: &str = "%Y-%m-%d";
pub const TIME_FORMAT: &str = "%H:%M:%S";

/// True when an id carries no usable identity: empty, blank, or only mask characters.
///
/// Partial masks such as `a***e` keep their alphanumerics and stay usable.
pub fn is_masked_id(bidder_id: &str) -> bool {
    !bidder_id.chars().any(|c| c.is_alphanumeric())
        && bidder_id.chars().all(|c| c == '*' || c.is_whitespace())
}

pub fn parse_date(text: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(text.trim(), DATE_FORMAT)
        .map_err(|e| format!("invalid date `{text}`: {e}"))
}

/// Accepts `HH:MM:SS` or `HH:MM`.
pub fn parse_time(text: &str) -> Result<NaiveTime, String> {
    let t = text.trim();
    NaiveTime::parse_from_str(t, TIME_FORMAT)
        .or_else(|_| NaiveTime::parse_from_str(t, "%H:%M"))
        .map_err(|e| format!("invalid time `{text}`: {e}"))
}

fn parse_amount(text: &str) -> Result<f64, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("not a number: `{text}`"))?;
    if !v.is_finite() {
        return Err(format!("not finite: `{text}`"));
    }
    if v < 0.0 {
        return Err(format!("negative amount: `{text}`"));
    }
    Ok(v)
}

fn parse_count<T: std::str::FromStr>(text: &str) -> Result<T, String> {
    let t = text.trim();
    if t.starts_with('-') {
        return Err(format!("negative count: `{text}`"));
    }
    t.parse()
        .map_err(|_| format!("not a non-negative integer: `{text}`"))
}

/// Normalizes a currency code; the scraped feed writes Canadian dollars as `CAN`.
pub fn parse_currency(text: &str) -> Result<String, String> {
    let code = text.trim().to_ascii_uppercase();
    let code = if code == "CAN" {
        "CAD".to_string()
    } else {
        code
    };
    if SUPPORTED_CURRENCIES.contains(&code.as_str()) {
        Ok(code)
    } else {
        Err(format!("unsupported currency `{text}`"))
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Resolves each schema field to its column index in `headers`.
fn resolve<F: Ord + Copy + fmt::Display>(
    schema: &Schema<F>,
    headers: &csv::StringRecord,
    field_name: fn(F) -> &'static str,
) -> Result<BTreeMap<F, usize>, IngestError> {
    if headers.is_empty() {
        return Err(IngestError::NoHeader);
    }
    schema
        .columns
        .iter()
        .map(|(&field, column)| {
            headers
                .iter()
                .position(|h| h.trim() == column)
                .map(|i| (field, i))
                .ok_or_else(|| IngestError::MissingColumn {
                    field: field_name(field),
                    column: column.clone(),
                })
        })
        .collect()
}

/// Collects per-field failures for one row.
struct RowCheck<'a> {
    row: usize,
    record: &'a csv::StringRecord,
    defects: Vec<Defect>,
}

impl<'a> RowCheck<'a> {
    fn get(&self, idx: usize) -> &'a str {
        self.record.get(idx).unwrap_or("")
    }

    fn take<T>(
        &mut self,
        field: &str,
        idx: usize,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Option<T> {
        match parse(self.get(idx)) {
            Ok(v) => Some(v),
            Err(reason) => {
                self.defects.push(Defect {
                    row: self.row,
                    field: field.to_string(),
                    reason,
                });
                None
            }
        }
    }
}

fn reader<R: Read>(input: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

pub fn parse_auction_file(
    path: &Path,
    schema: &AuctionSchema,
    delimiter: u8,
) -> Result<(Vec<RawBidRecord>, ParseReport), IngestError> {
    parse_auctions(open(path)?, schema, delimiter)
}

/// Parses auction bid rows from any reader; see [`parse_auction_file`].
pub fn parse_auctions<R: Read>(
    input: R,
    schema: &AuctionSchema,
    delimiter: u8,
) -> Result<(Vec<RawBidRecord>, ParseReport), IngestError> {
    use AuctionField as F;

    let mut rdr = reader(input, delimiter);
    let headers = rdr.headers()?.clone();
    let idx = resolve(schema, &headers, AuctionField::key)?;
    let mapped: BTreeSet<usize> = idx.values().copied().collect();

    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        report.rows_read += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                report.defects.push(Defect {
                    row: row_no,
                    field: "row".into(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if row.len() != headers.len() {
            report.defects.push(Defect {
                row: row_no,
                field: "row".into(),
                reason: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
            continue;
        }

        let mut c = RowCheck {
            row: row_no,
            record: &row,
            defects: Vec::new(),
        };
        let text = |s: &str| Ok::<_, String>(s.trim().to_string());
        let product_url = c.take(F::ProductUrl.key(), idx[&F::ProductUrl], text);
        let seller_id = c.take(F::SellerId.key(), idx[&F::SellerId], text);
        let bidder_id = c.take(F::BidderId.key(), idx[&F::BidderId], text);
        let bid_amount = c.take(F::BidAmount.key(), idx[&F::BidAmount], parse_amount);
        let bid_currency = c.take(F::BidCurrency.key(), idx[&F::BidCurrency], parse_currency);
        let bid_date = c.take(F::BidDate.key(), idx[&F::BidDate], parse_date);
        let bid_time = c.take(F::BidTime.key(), idx[&F::BidTime], parse_time);
        let start_date = c.take(
            F::AuctionStartDate.key(),
            idx[&F::AuctionStartDate],
            parse_date,
        );
        let start_time = c.take(
            F::AuctionStartTime.key(),
            idx[&F::AuctionStartTime],
            parse_time,
        );
        let duration_text = c.take(F::Duration.key(), idx[&F::Duration], text);
        let opening = c.take(F::OpeningPrice.key(), idx[&F::OpeningPrice], parse_amount);
        let winning = c.take(F::WinningPrice.key(), idx[&F::WinningPrice], parse_amount);
        let n_bids = c.take(F::NBids.key(), idx[&F::NBids], parse_count::<u32>);

        if !c.defects.is_empty() {
            report.defects.append(&mut c.defects);
            continue;
        }
        let extra_fields = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| !mapped.contains(i))
            .map(|(i, h)| (h.to_string(), row.get(i).unwrap_or("").to_string()))
            .collect();
        // every Option is Some once no defect was recorded
        records.push(RawBidRecord {
            product_url: product_url.unwrap(),
            seller_id: seller_id.unwrap(),
            bidder_id: bidder_id.unwrap(),
            bid_amount: bid_amount.unwrap(),
            bid_currency: bid_currency.unwrap(),
            bid_date: bid_date.unwrap(),
            bid_time: bid_time.unwrap(),
            auction_start_date: start_date.unwrap(),
            auction_start_time: start_time.unwrap(),
            duration_text: duration_text.unwrap(),
            opening_price: opening.unwrap(),
            declared_winning_price: winning.unwrap(),
            declared_n_bids: n_bids.unwrap(),
            extra_fields,
        });
        report.rows_accepted += 1;
    }
    Ok((records, report))
}

pub fn parse_history_file(
    path: &Path,
    schema: &HistorySchema,
    delimiter: u8,
) -> Result<(Vec<RawHistoryRecord>, ParseReport), IngestError> {
    parse_histories(open(path)?, schema, delimiter)
}

pub fn parse_histories<R: Read>(
    input: R,
    schema: &HistorySchema,
    delimiter: u8,
) -> Result<(Vec<RawHistoryRecord>, ParseReport), IngestError> {
    use HistoryField as F;

    let mut rdr = reader(input, delimiter);
    let headers = rdr.headers()?.clone();
    let idx = resolve(schema, &headers, HistoryField::key)?;

    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        report.rows_read += 1;
        let row = match row {
            Ok(r) if r.len() == headers.len() => r,
            Ok(r) => {
                report.defects.push(Defect {
                    row: row_no,
                    field: "row".into(),
                    reason: format!("expected {} fields, found {}", headers.len(), r.len()),
                });
                continue;
            }
            Err(e) => {
                report.defects.push(Defect {
                    row: row_no,
                    field: "row".into(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let mut c = RowCheck {
            row: row_no,
            record: &row,
            defects: Vec::new(),
        };
        let text = |s: &str| Ok::<_, String>(s.trim().to_string());
        let bidder_id = c.take(F::BidderId.key(), idx[&F::BidderId], text);
        let rating = c.take(
            F::BuyerRating.key(),
            idx[&F::BuyerRating],
            parse_count::<u64>,
        );
        let items = c.take(
            F::ItemsBidOn30d.key(),
            idx[&F::ItemsBidOn30d],
            parse_count::<u64>,
        );
        let retractions = c.take(
            F::Retractions30d.key(),
            idx[&F::Retractions30d],
            parse_count::<u64>,
        );
        let activity = c.take(
            F::ActivityWithSeller.key(),
            idx[&F::ActivityWithSeller],
            text,
        );
        if !c.defects.is_empty() {
            report.defects.append(&mut c.defects);
            continue;
        }
        records.push(RawHistoryRecord {
            bidder_id: bidder_id.unwrap(),
            buyer_rating: rating.unwrap(),
            items_bid_on_30d: items.unwrap(),
            n_bid_retractions_30d: retractions.unwrap(),
            activity_with_seller_raw: activity.unwrap(),
        });
        report.rows_accepted += 1;
    }
    Ok((records, report))
}

/// Writes records under the schema's headers in canonical column order.
///
/// Extra fields are not written; they never survive preprocessing.
pub fn write_auctions<W: Write>(
    records: &[RawBidRecord],
    schema: &AuctionSchema,
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    w.write_record(AuctionField::ALL.iter().map(|&f| schema.column(f)))?;
    for r in records {
        w.write_record(r.canonical_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histories<W: Write>(
    records: &[RawHistoryRecord],
    schema: &HistorySchema,
    out: W,
    delimiter: u8,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    w.write_record(HistoryField::ALL.iter().map(|&f| schema.column(f)))?;
    for r in records {
        w.write_record([
            r.bidder_id.clone(),
            r.buyer_rating.to_string(),
            r.items_bid_on_30d.to_string(),
            r.n_bid_retractions_30d.to_string(),
            r.activity_with_seller_raw.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "product_url,seller_id,bidder_id,bid_amount,bid_currency,bid_date,bid_time,auction_start_date,auction_start_time,duration,opening_price,winning_price,n_bids";

    fn row(bidder: &str, amount: &str) -> String {
        format!(
            "u1,s1,{bidder},{amount},USD,2017-04-02,06:52:08,2017-04-01,00:00:00,7 Days,100,581,3"
        )
    }

    fn parse(text: &str) -> (Vec<RawBidRecord>, ParseReport) {
        parse_auctions(text.as_bytes(), &AuctionSchema::default(), b',').unwrap()
    }

    #[test]
    fn header_only_yields_nothing() {
        let (recs, rep) = parse(&format!("{HEADER}\n"));
        assert!(recs.is_empty());
        assert_eq!(rep.rows_read, 0);
        assert_eq!(rep.rows_accepted, 0);
    }

    #[test]
    fn well_formed_rows_pass_through() {
        let text = format!(
            "{HEADER}\n{}\n{}\n{}\n",
            row("a***e", "120"),
            row("z***c", "130"),
            row("b1", "140.5")
        );
        let (recs, rep) = parse(&text);
        assert_eq!(recs.len(), 3);
        assert_eq!(rep.rows_accepted, 3);
        assert_eq!(recs[2].bid_amount, 140.5);
        assert_eq!(recs[0].bidder_id, "a***e");
    }

    #[test]
    fn bad_amount_is_a_defect() {
        let rows: Vec<String> = ["1", "2", "abc", "4", "5"]
            .iter()
            .map(|a| row("b", a))
            .collect();
        let text = format!("{HEADER}\n{}\n", rows.join("\n"));
        let (recs, rep) = parse(&text);
        assert_eq!(recs.len(), 4);
        assert_eq!(rep.defects.len(), 1);
        assert_eq!(rep.defects[0].field, "bid_amount");
        assert_eq!(rep.defects[0].row, 3);
        assert_eq!(rep.rows_read, rep.rows_accepted + rep.rows_rejected());
    }

    #[test]
    fn unsupported_currency_and_negative_amount_are_defects() {
        let bad_cur = row("b", "10").replace("USD", "JPY");
        let text = format!("{HEADER}\n{bad_cur}\n{}\n", row("b", "-3"));
        let (recs, rep) = parse(&text);
        assert!(recs.is_empty());
        assert_eq!(rep.rows_rejected(), 2);
    }

    #[test]
    fn can_is_read_as_cad() {
        let text = format!("{HEADER}\n{}\n", row("b", "10").replace("USD", "CAN"));
        let (recs, _) = parse(&text);
        assert_eq!(recs[0].bid_currency, "CAD");
    }

    #[test]
    fn missing_column_is_fatal() {
        let text = "product_url,seller_id\nu,s\n";
        let err = parse_auctions(text.as_bytes(), &AuctionSchema::default(), b',').unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn { .. }));
    }

    #[test]
    fn unreadable_file_is_fatal() {
        let err = parse_auction_file(
            Path::new("/nonexistent/x.csv"),
            &AuctionSchema::default(),
            b',',
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
    }

    #[test]
    fn extra_columns_ride_along() {
        let text = format!("{HEADER},condition\n{},used\n", row("b", "10"));
        let (recs, _) = parse(&text);
        assert_eq!(
            recs[0].extra_fields.get("condition").map(String::as_str),
            Some("used")
        );
    }

    #[test]
    fn renamed_columns_and_delimiter() {
        let mut schema = AuctionSchema::default();
        schema.set(AuctionField::BidderId, "Bidder ID");
        let text = format!("{HEADER}\n{}\n", row("b9", "10"))
            .replace("bidder_id", "Bidder ID")
            .replace(',', ";");
        let (recs, rep) = parse_auctions(text.as_bytes(), &schema, b';').unwrap();
        assert_eq!(rep.rows_accepted, 1);
        assert_eq!(recs[0].bidder_id, "b9");
    }

    #[test]
    fn history_row_maps_fields() {
        let text = "bidder_id,buyer_rating,items_bid_on_30d,n_bid_retractions_30d,activity_with_seller\nb1,0,8,1,30%\n";
        let (recs, rep) =
            parse_histories(text.as_bytes(), &HistorySchema::default(), b',').unwrap();
        assert_eq!(rep.rows_accepted, 1);
        assert_eq!(
            recs[0],
            RawHistoryRecord {
                bidder_id: "b1".into(),
                buyer_rating: 0,
                items_bid_on_30d: 8,
                n_bid_retractions_30d: 1,
                activity_with_seller_raw: "30%".into(),
            }
        );
    }

    #[test]
    fn history_negative_count_and_duplicates() {
        let text = "bidder_id,buyer_rating,items_bid_on_30d,n_bid_retractions_30d,activity_with_seller\nb1,0,8,-1,30%\nb2,1,1,0,0%\nb2,1,1,0,0%\n";
        let (recs, rep) =
            parse_histories(text.as_bytes(), &HistorySchema::default(), b',').unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(rep.defects[0].field, "n_bid_retractions_30d");
        assert_eq!(recs[0], recs[1]);
    }

    #[test]
    fn masked_ids() {
        assert!(is_masked_id(""));
        assert!(is_masked_id("   "));
        assert!(is_masked_id("****"));
        assert!(!is_masked_id("a***e"));
        assert!(!is_masked_id("****8"));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let text = format!("{HEADER}\n{}\n{}\n", row("a***e", "120.25"), row("b", "7"));
        let (recs, _) = parse(&text);
        let mut buf = Vec::new();
        write_auctions(&recs, &AuctionSchema::default(), &mut buf, b',').unwrap();
        let (again, _) = parse(std::str::from_utf8(&buf).unwrap());
        assert_eq!(recs, again);
    }
}
