//! Stage commands behind the `shillset` binary.
//!
//! Each command reads its inputs from the config (or from earlier stages'
//! files in the output directory) and writes only under that directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::config::PipelineConfig;
use crate::dataset::{self, header_matches, CLEAN_HEADER, HISTORY_HEADER};
use crate::error::{Error, Result};
use crate::filter::{run_filter, FilterReport};
use crate::ingest::{
    self, parse_auction_file, parse_history_file, write_defects, Defect, ParseReport,
};
use crate::metrics::{build_samples, SbSample};
use crate::preprocess::{
    self, clean_histories, Auction, BidderHistory, HistoryCounts, PreprocessCounts,
};
use crate::report::StatsReport;
use crate::synth::{self, SynthOutput};

pub const SYNTH_AUCTIONS: &str = "synth_auctions.csv";
pub const SYNTH_HISTORIES: &str = "synth_histories.csv";
pub const TRUTH: &str = "truth.csv";
pub const PREPROCESSED: &str = "preprocessed.csv";
pub const AUCTION_META: &str = "auctions.csv";
pub const HISTORIES_CLEAN: &str = "histories_clean.csv";
pub const REPAIRS: &str = "repairs.csv";
pub const DEFECTS: &str = "defects.csv";
pub const HISTORY_DEFECTS: &str = "history_defects.csv";
pub const STATS_RAW: &str = "stats_raw.txt";
pub const STATS_CLEAN: &str = "stats_clean.txt";
pub const PREPROCESS_SUMMARY: &str = "preprocess_summary.txt";
pub const SAMPLES_RAW: &str = "samples_raw.csv";
pub const DATASET: &str = "dataset.csv";
pub const FILTER_REPORT: &str = "filter_report.csv";
pub const DROPPED: &str = "dropped.csv";
pub const FILTER_SUMMARY: &str = "filter_summary.txt";
pub const STATS: &str = "stats.txt";
pub const RUN_SUMMARY: &str = "run_summary.txt";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn ensure_out(cfg: &PipelineConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    Ok(&cfg.out_dir)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(io_err(path))
}

/// Writes a whole file through `body`.
fn emit<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn emit_text(path: &Path, text: &str) -> Result<()> {
    emit(path, |w| w.write_all(text.as_bytes()).map_err(io_err(path)))
}

fn read_headers(path: &Path, delimiter: u8) -> Result<csv::StringRecord> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(open(path)?);
    Ok(rdr.headers()?.clone())
}

pub fn cmd_synth(cfg: &PipelineConfig) -> Result<SynthOutput> {
    let out = ensure_out(cfg)?;
    let generated = synth::generate(&cfg.synth, &cfg.rates)?;
    let d = cfg.delimiter;
    let p = out.join(SYNTH_AUCTIONS);
    emit(&p, |w| {
        Ok(ingest::write_auctions(
            &generated.records,
            &cfg.auction_schema,
            w,
            d,
        )?)
    })?;
    let p = out.join(SYNTH_HISTORIES);
    emit(&p, |w| {
        Ok(ingest::write_histories(
            &generated.histories,
            &cfg.history_schema,
            w,
            d,
        )?)
    })?;
    let p = out.join(TRUTH);
    emit(&p, |w| Ok(synth::write_truth(&generated.truth, w, d)?))?;
    info!(
        "generated {} bid rows, {} histories, {} shills",
        generated.records.len(),
        generated.histories.len(),
        generated.shills.len()
    );
    Ok(generated)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessSummary {
    /// `None` when the input was an already preprocessed dataset.
    pub parse: Option<ParseReport>,
    pub counts: PreprocessCounts,
    pub history: Option<HistoryCounts>,
    pub repairs: usize,
    pub raw_stats: Option<StatsReport>,
    pub clean_stats: StatsReport,
}

impl PreprocessSummary {
    /// Rows read from the auction file, accounted for stage by stage.
    pub fn accounting(&self) -> String {
        let c = &self.counts;
        let mut s = String::new();
        if let Some(p) = &self.parse {
            s.push_str(&format!("rows_read={}\n", p.rows_read));
            s.push_str(&format!("rows_rejected_at_parse={}\n", p.rows_rejected()));
        }
        s.push_str(&format!("records_in={}\n", c.input));
        s.push_str(&format!("duplicates_removed={}\n", c.duplicates));
        s.push_str(&format!("masked_dropped={}\n", c.masked));
        s.push_str(&format!("defect_flagged={}\n", c.defects));
        s.push_str(&format!("orphaned={}\n", c.orphaned));
        s.push_str(&format!("bids_out={}\n", c.output_bids));
        s.push_str(&format!("repairs={}\n", self.repairs));
        if let Some(h) = &self.history {
            s.push_str(&format!(
                "history_rows_in={}\nhistory_duplicates={}\nhistory_masked={}\nhistory_defects={}\nhistory_conflicts={}\nhistories_out={}\n",
                h.input, h.duplicates, h.masked, h.defects, h.conflicts, h.output
            ));
        }
        s
    }
}

/// Accepted records' file row numbers: every row not rejected at parse time.
fn accepted_rows(report: &ParseReport) -> Vec<usize> {
    let rejected: BTreeSet<usize> = report.defects.iter().map(|d| d.row).collect();
    (1..=report.rows_read)
        .filter(|r| !rejected.contains(r))
        .collect()
}

pub fn cmd_preprocess(cfg: &PipelineConfig) -> Result<PreprocessSummary> {
    let input = cfg
        .auctions
        .clone()
        .ok_or_else(|| Error::MissingInput("input.auctions is not set".into()))?;
    let d = cfg.delimiter;
    let headers = read_headers(&input, d)?;
    if headers.is_empty() {
        return Err(Error::EmptyInput(input.display().to_string()));
    }

    let (auctions, repairs, counts, parse, raw_stats, defects) =
        if header_matches(&headers, &CLEAN_HEADER) {
            // already preprocessed: regroup and re-repair; a no-op on our own output
            let meta_path = input.with_file_name(AUCTION_META);
            let (bids, metas) = dataset::read_clean(open(&input)?, open(&meta_path)?, d)?;
            if bids.is_empty() {
                return Err(Error::EmptyInput(input.display().to_string()));
            }
            let n = bids.len();
            let (auctions, repairs, duplicates) = preprocess::normalize(bids, &metas);
            let output_bids: usize = auctions.iter().map(|a| a.bids.len()).sum();
            let counts = PreprocessCounts {
                input: n,
                duplicates,
                orphaned: n - duplicates - output_bids,
                output_bids,
                ..Default::default()
            };
            (auctions, repairs, counts, None, None, Vec::new())
        } else {
            let (records, report) = parse_auction_file(&input, &cfg.auction_schema, d)?;
            if report.rows_read == 0 {
                return Err(Error::EmptyInput(input.display().to_string()));
            }
            let raw_stats = StatsReport::from_raw(&records, headers.len());
            let rows = accepted_rows(&report);
            let out = preprocess::preprocess(records, &cfg.rates);
            let mut defects = report.defects.clone();
            defects.extend(out.defects.into_iter().map(|x| Defect {
                row: rows[x.row - 1],
                ..x
            }));
            defects.sort_by_key(|x| x.row);
            (
                out.auctions,
                out.repairs,
                out.counts,
                Some(report),
                Some(raw_stats),
                defects,
            )
        };

    let histories = match &cfg.histories {
        Some(path) => Some(load_histories(path, cfg)?),
        None => None,
    };

    let out = ensure_out(cfg)?;
    let clean_stats = StatsReport::from_auctions(&auctions);
    let p = out.join(PREPROCESSED);
    emit(&p, |w| Ok(dataset::write_clean(&auctions, w, d)?))?;
    let p = out.join(AUCTION_META);
    emit(&p, |w| Ok(dataset::write_auction_meta(&auctions, w, d)?))?;
    let p = out.join(REPAIRS);
    emit(&p, |w| Ok(dataset::write_repairs(&repairs, w, d)?))?;
    let p = out.join(DEFECTS);
    emit(&p, |w| Ok(write_defects(&defects, w, d)?))?;
    emit_text(&out.join(STATS_CLEAN), &clean_stats.to_string())?;
    if let Some(s) = &raw_stats {
        emit_text(&out.join(STATS_RAW), &s.to_string())?;
    }
    let history_counts = match histories {
        Some((map, hdefects, hcounts)) => {
            let p = out.join(HISTORIES_CLEAN);
            emit(&p, |w| Ok(dataset::write_histories(&map, w, d)?))?;
            let p = out.join(HISTORY_DEFECTS);
            emit(&p, |w| Ok(write_defects(&hdefects, w, d)?))?;
            Some(hcounts)
        }
        None => None,
    };

    let summary = PreprocessSummary {
        parse,
        counts,
        history: history_counts,
        repairs: repairs.len(),
        raw_stats,
        clean_stats,
    };
    emit_text(&out.join(PREPROCESS_SUMMARY), &summary.accounting())?;
    info!(
        "preprocessed {} auctions, {} bids, {} repairs",
        auctions.len(),
        summary.counts.output_bids,
        summary.repairs
    );
    Ok(summary)
}

type LoadedHistories = (BTreeMap<String, BidderHistory>, Vec<Defect>, HistoryCounts);

/// Reads raw histories, or cleaned ones when the file carries the cleaned header.
fn load_histories(path: &Path, cfg: &PipelineConfig) -> Result<LoadedHistories> {
    let d = cfg.delimiter;
    if header_matches(&read_headers(path, d)?, &HISTORY_HEADER) {
        let map = dataset::read_histories(open(path)?, d)?;
        let counts = HistoryCounts {
            input: map.len(),
            output: map.len(),
            ..Default::default()
        };
        return Ok((map, Vec::new(), counts));
    }
    let (records, report) = parse_history_file(path, &cfg.history_schema, d)?;
    let rows = accepted_rows(&report);
    let (map, defects, mut counts) = clean_histories(records);
    let mut all = report.defects.clone();
    all.extend(defects.into_iter().map(|x| Defect {
        row: rows[x.row - 1],
        ..x
    }));
    all.sort_by_key(|x| x.row);
    counts.input = report.rows_read;
    counts.defects += report.rows_rejected();
    Ok((map, all, counts))
}

/// Loads the preprocessed auctions from the output directory.
pub fn load_auctions(cfg: &PipelineConfig) -> Result<Vec<Auction>> {
    let data = cfg.out_dir.join(PREPROCESSED);
    let meta = cfg.out_dir.join(AUCTION_META);
    let (bids, metas) = dataset::read_clean(open(&data)?, open(&meta)?, cfg.delimiter)?;
    let (auctions, _, _) = preprocess::normalize(bids, &metas);
    Ok(auctions)
}

pub fn cmd_features(cfg: &PipelineConfig) -> Result<Vec<SbSample<f64>>> {
    let auctions = load_auctions(cfg)?;
    let hpath = cfg.out_dir.join(HISTORIES_CLEAN);
    let histories = if hpath.exists() {
        dataset::read_histories(open(&hpath)?, cfg.delimiter)?
    } else {
        warn!(
            "no cleaned bidder histories at {}; using defaults",
            hpath.display()
        );
        BTreeMap::new()
    };
    let samples = build_samples(&auctions, &histories, &cfg.metric_config());
    let out = ensure_out(cfg)?;
    let p = out.join(SAMPLES_RAW);
    emit(&p, |w| {
        Ok(dataset::write_samples(&samples, w, cfg.delimiter)?)
    })?;
    info!(
        "scored {} samples over {} auctions",
        samples.len(),
        auctions.len()
    );
    Ok(samples)
}

pub fn cmd_filter(cfg: &PipelineConfig) -> Result<(Vec<SbSample<f64>>, FilterReport<f64>)> {
    let input = cfg.out_dir.join(SAMPLES_RAW);
    let samples: Vec<SbSample<f64>> = dataset::read_samples(open(&input)?, cfg.delimiter)?;
    if samples.is_empty() {
        return Err(Error::EmptyInput(input.display().to_string()));
    }
    let (kept, report) = run_filter(samples, cfg.iqr_k)?;
    let out = ensure_out(cfg)?;
    let d = cfg.delimiter;
    let p = out.join(DATASET);
    emit(&p, |w| Ok(dataset::write_samples(&kept, w, d)?))?;
    let p = out.join(FILTER_REPORT);
    emit(&p, |w| Ok(dataset::write_filter_report(&report, w, d)?))?;
    let p = out.join(DROPPED);
    emit(&p, |w| Ok(dataset::write_dropped(&report, w, d)?))?;
    emit_text(&out.join(FILTER_SUMMARY), &dataset::filter_summary(&report))?;
    info!(
        "filter kept {} of {} samples",
        report.samples_out, report.samples_in
    );
    Ok((kept, report))
}

/// Statistics of `input.auctions` (raw or preprocessed), falling back to the
/// preprocessed dataset in the output directory.
pub fn cmd_stats(cfg: &PipelineConfig) -> Result<StatsReport> {
    let d = cfg.delimiter;
    let input = cfg
        .auctions
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join(PREPROCESSED));
    let headers = read_headers(&input, d)?;
    let stats = if header_matches(&headers, &CLEAN_HEADER) {
        let meta = input.with_file_name(AUCTION_META);
        let (bids, metas) = dataset::read_clean(open(&input)?, open(&meta)?, d)?;
        let (auctions, _, _) = preprocess::normalize(bids, &metas);
        StatsReport::from_auctions(&auctions)
    } else {
        let (records, _) = parse_auction_file(&input, &cfg.auction_schema, d)?;
        StatsReport::from_raw(&records, headers.len())
    };
    let out = ensure_out(cfg)?;
    emit_text(&out.join(STATS), &stats.to_string())?;
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub synthesized: bool,
    pub preprocess: PreprocessSummary,
    pub samples: usize,
    pub filter: FilterReport<f64>,
}

impl RunSummary {
    pub fn text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("synthetic_input={}\n", self.synthesized));
        s.push_str(&self.preprocess.accounting());
        s.push_str(&format!("samples={}\n", self.samples));
        s.push_str(&format!(
            "samples_dropped={}\n",
            self.filter.samples_dropped
        ));
        s.push_str(&format!("samples_out={}\n", self.filter.samples_out));
        s
    }
}

/// Synthesize (when no auction input is configured), preprocess, score, filter.
pub fn cmd_run(cfg: &PipelineConfig) -> Result<RunSummary> {
    let mut cfg = cfg.clone();
    let synthesized = cfg.auctions.is_none();
    if synthesized {
        cmd_synth(&cfg)?;
        cfg.auctions = Some(cfg.out_dir.join(SYNTH_AUCTIONS));
        cfg.histories = Some(cfg.out_dir.join(SYNTH_HISTORIES));
    }
    let preprocess = cmd_preprocess(&cfg)?;
    let samples = cmd_features(&cfg)?.len();
    let (_, filter) = cmd_filter(&cfg)?;
    let summary = RunSummary {
        synthesized,
        preprocess,
        samples,
        filter,
    };
    emit_text(&cfg.out_dir.join(RUN_SUMMARY), &summary.text())?;
    Ok(summary)
}

/// Output path of a named stage file.
pub fn out_path(cfg: &PipelineConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}
