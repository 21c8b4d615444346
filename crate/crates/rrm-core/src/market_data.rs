//! Minute-bar ingestion: parsing, session gridding, forward filling, export.
//!
//! Raw input is a delimited text table with header `timestamp,price,volume`.
//! Rows outside the regular session are dropped, each day is gridded onto the
//! 391 one-minute points from 09:30 to 16:00, gaps are forward-filled from the
//! previous available price (the leading gap backward-fills from the first
//! observation of the day), and prices are converted to log prices. Days with
//! under 50% minute coverage are skipped with a warning.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular trading session expressed in minutes of day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSpec {
    /// First minute of the session (inclusive), e.g. 570 for 09:30.
    pub open_minute: u32,
    /// Last minute of the session (inclusive), e.g. 960 for 16:00.
    pub close_minute: u32,
}

impl Default for SessionSpec {
    fn default() -> Self {
        // 09:30 - 16:00, 391 grid points and 390 one-minute returns
        Self {
            open_minute: 9 * 60 + 30,
            close_minute: 16 * 60,
        }
    }
}

impl SessionSpec {
    /// Number of grid points in the session (close and open inclusive).
    pub fn grid_points(&self) -> usize {
        (self.close_minute - self.open_minute) as usize + 1
    }

    /// Minimum observed minutes for a day to be kept (50% coverage).
    pub fn min_coverage(&self) -> usize {
        self.grid_points().div_ceil(2)
    }
}

/// A single raw observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinuteBar {
    pub timestamp: NaiveDateTime,
    /// Trade price, strictly positive.
    pub price: f64,
    /// Traded shares in the bar, non-negative.
    pub volume: f64,
}

/// One trading day on the session grid.
///
/// `log_prices` holds the S_0..S_n log-price points (391 under the default
/// session); `volumes[k]` is the volume attributed to the interval from grid
/// point k to k+1, taken from the bar stamped at minute k+1 (no interval
/// precedes the opening print, so its volume is not carried).
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayDay {
    pub date: NaiveDate,
    pub log_prices: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl IntradayDay {
    pub fn new(date: NaiveDate, log_prices: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        if log_prices.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "day {date}: need at least 2 log prices, got {}",
                log_prices.len()
            )));
        }
        if volumes.len() != log_prices.len() - 1 {
            return Err(Error::InvalidInput(format!(
                "day {date}: {} volumes do not align with {} price points",
                volumes.len(),
                log_prices.len()
            )));
        }
        if !log_prices.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("day {date}: non-finite log price")));
        }
        if !volumes.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidInput(format!("day {date}: invalid volume")));
        }
        Ok(Self {
            date,
            log_prices,
            volumes,
        })
    }

    /// Number of one-minute return intervals (grid points - 1).
    pub fn intervals(&self) -> usize {
        self.log_prices.len() - 1
    }
}

/// Close-to-open daily log return S_n - S_0.
pub fn daily_return(day: &IntradayDay) -> f64 {
    day.log_prices[day.log_prices.len() - 1] - day.log_prices[0]
}

/// An ordered panel of trading days for one asset.
#[derive(Debug, Clone, PartialEq)]
pub struct DayPanel {
    pub asset_id: String,
    pub days: Vec<IntradayDay>,
}

impl DayPanel {
    pub fn new(asset_id: impl Into<String>, days: Vec<IntradayDay>) -> Result<Self> {
        for pair in days.windows(2) {
            if pair[1].date <= pair[0].date {
                return Err(Error::InvalidInput(format!(
                    "panel dates must be strictly increasing: {} then {}",
                    pair[0].date, pair[1].date
                )));
            }
        }
        Ok(Self {
            asset_id: asset_id.into(),
            days,
        })
    }

    pub fn daily_returns(&self) -> Vec<f64> {
        self.days.iter().map(daily_return).collect()
    }
}

fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
}

/// Parse raw minute bars into a session-gridded panel.
///
/// Rows outside the session are dropped. Within a day the last bar stamped in
/// a minute wins. Days with fewer observed minutes than the coverage floor are
/// skipped and logged.
pub fn parse_minute_csv<R: Read>(
    source: R,
    session: SessionSpec,
    asset_id: &str,
) -> Result<DayPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    // slot -> (price, volume) per day
    type DaySlots = BTreeMap<usize, (f64, f64)>;
    let mut per_day: BTreeMap<NaiveDate, DaySlots> = BTreeMap::new();

    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e
                .position()
                .map(|p| p.line())
                .unwrap_or_default(),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        let parse_failure = |message: String| Error::Parse { line, message };

        if record.len() < 3 {
            return Err(parse_failure(format!("expected 3 columns, got {}", record.len())));
        }
        let ts = parse_timestamp(&record[0])
            .ok_or_else(|| parse_failure(format!("bad timestamp {:?}", &record[0])))?;
        let price: f64 = record[1]
            .parse()
            .map_err(|_| parse_failure(format!("bad price {:?}", &record[1])))?;
        let volume: f64 = record[2]
            .parse()
            .map_err(|_| parse_failure(format!("bad volume {:?}", &record[2])))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(parse_failure(format!("price must be positive, got {price}")));
        }
        if !(volume.is_finite() && volume >= 0.0) {
            return Err(parse_failure(format!("volume must be non-negative, got {volume}")));
        }

        let minute = ts.time().hour() * 60 + ts.time().minute();
        if minute < session.open_minute || minute > session.close_minute {
            continue;
        }
        let slot = (minute - session.open_minute) as usize;
        per_day.entry(ts.date()).or_default().insert(slot, (price, volume));
    }

    let n = session.grid_points();
    let mut days = Vec::with_capacity(per_day.len());
    for (date, slots) in per_day {
        if slots.len() < session.min_coverage() {
            warn!(
                "skipping {date}: only {} of {} minutes observed (need {})",
                slots.len(),
                n,
                session.min_coverage()
            );
            continue;
        }
        let first_price = slots
            .values()
            .next()
            .map(|&(p, _)| p)
            .expect("coverage floor is at least 1");

        let mut log_prices = Vec::with_capacity(n);
        let mut volumes = vec![0.0; n - 1];
        let mut last_price = first_price;
        for slot in 0..n {
            if let Some(&(price, volume)) = slots.get(&slot) {
                last_price = price;
                if slot >= 1 {
                    volumes[slot - 1] = volume;
                }
            }
            log_prices.push(last_price.ln());
        }
        days.push(IntradayDay::new(date, log_prices, volumes)?);
    }

    DayPanel::new(asset_id, days)
}

/// Parse a minute CSV file, transparently inflating `.gz` inputs.
pub fn parse_minute_file(path: &Path, session: SessionSpec, asset_id: &str) -> Result<DayPanel> {
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        parse_minute_csv(flate2::read::GzDecoder::new(file), session, asset_id)
    } else {
        parse_minute_csv(file, session, asset_id)
    }
}

/// Export a panel as columnar CSV: date, minute, log_price, volume.
///
/// Log prices are written in shortest round-trip form, so re-importing
/// reproduces them bit for bit. The minute-0 row carries volume 0 (no interval
/// precedes the opening print).
pub fn export_panel_csv<W: Write>(panel: &DayPanel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "minute", "log_price", "volume"])
        .map_err(csv_io_error)?;
    for day in &panel.days {
        for (minute, lp) in day.log_prices.iter().enumerate() {
            let volume = if minute == 0 { 0.0 } else { day.volumes[minute - 1] };
            w.write_record(&[
                day.date.to_string(),
                minute.to_string(),
                lp.to_string(),
                volume.to_string(),
            ])
            .map_err(csv_io_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Import a panel previously written by [`export_panel_csv`].
pub fn import_panel_csv<R: Read>(source: R, asset_id: &str) -> Result<DayPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut per_day: BTreeMap<NaiveDate, Vec<(usize, f64, f64)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or_default(),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        let bad = |message: String| Error::Parse { line, message };
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|_| bad(format!("bad date {:?}", &record[0])))?;
        let minute: usize = record[1]
            .parse()
            .map_err(|_| bad(format!("bad minute {:?}", &record[1])))?;
        let log_price: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("bad log price {:?}", &record[2])))?;
        let volume: f64 = record[3]
            .parse()
            .map_err(|_| bad(format!("bad volume {:?}", &record[3])))?;
        per_day.entry(date).or_default().push((minute, log_price, volume));
    }

    let mut days = Vec::with_capacity(per_day.len());
    for (date, mut rows) in per_day {
        rows.sort_by_key(|r| r.0);
        let log_prices: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let volumes: Vec<f64> = rows.iter().skip(1).map(|r| r.2).collect();
        days.push(IntradayDay::new(date, log_prices, volumes)?);
    }
    DayPanel::new(asset_id, days)
}

fn csv_io_error(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv write failure: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn constant_price_day_csv(date: &str, price: f64) -> String {
        let mut s = String::from("timestamp,price,volume\n");
        for minute in 0..=390u32 {
            let (h, m) = ((570 + minute) / 60, (570 + minute) % 60);
            s.push_str(&format!("{date}T{h:02}:{m:02}:00,{price},100\n"));
        }
        s
    }

    #[test]
    fn constant_day_parses_to_constant_log_prices() {
        let csv = constant_price_day_csv("2015-01-02", 100.0);
        let panel = parse_minute_csv(csv.as_bytes(), SessionSpec::default(), "TEST").unwrap();
        assert_eq!(panel.days.len(), 1);
        let day = &panel.days[0];
        assert_eq!(day.log_prices.len(), 391);
        assert_eq!(day.volumes.len(), 390);
        assert!(day.log_prices.iter().all(|&lp| lp == 100.0f64.ln()));
        assert!(day.volumes.iter().all(|&v| v == 100.0));
        assert_relative_eq!(daily_return(day), 0.0);
    }

    #[test]
    fn missing_minute_is_forward_filled_with_previous_price() {
        // drop the 12:00 bar; 11:59 trades at 101
        let mut s = String::from("timestamp,price,volume\n");
        for minute in 0..=390u32 {
            let abs = 570 + minute;
            if abs == 720 {
                continue; // 12:00 missing
            }
            let price = if abs == 719 { 101.0 } else { 100.0 };
            s.push_str(&format!(
                "2015-01-02T{:02}:{:02}:00,{price},50\n",
                abs / 60,
                abs % 60
            ));
        }
        let panel = parse_minute_csv(s.as_bytes(), SessionSpec::default(), "TEST").unwrap();
        let day = &panel.days[0];
        let slot_1200 = (720 - 570) as usize;
        assert_relative_eq!(day.log_prices[slot_1200], 101.0f64.ln());
        // forward fill introduces no price change over the filled slot
        assert_relative_eq!(day.log_prices[slot_1200] - day.log_prices[slot_1200 - 1], 0.0);
        // missing bar means zero volume on that interval
        assert_relative_eq!(day.volumes[slot_1200 - 1], 0.0);
    }

    #[test]
    fn leading_gap_backfills_from_first_observation() {
        let mut s = String::from("timestamp,price,volume\n");
        for minute in 30..=390u32 {
            let abs = 570 + minute;
            s.push_str(&format!(
                "2015-01-02T{:02}:{:02}:00,42.0,50\n",
                abs / 60,
                abs % 60
            ));
        }
        let panel = parse_minute_csv(s.as_bytes(), SessionSpec::default(), "TEST").unwrap();
        let day = &panel.days[0];
        assert_eq!(day.log_prices.len(), 391);
        assert!(day.log_prices.iter().all(|&lp| lp == 42.0f64.ln()));
    }

    #[test]
    fn sparse_day_is_skipped_and_others_kept() {
        let mut csv = constant_price_day_csv("2015-01-02", 100.0);
        // second day: single observation, far below the coverage floor
        csv.push_str("2015-01-05T10:00:00,99.0,10\n");
        let tail = constant_price_day_csv("2015-01-06", 101.0);
        csv.push_str(tail.strip_prefix("timestamp,price,volume\n").unwrap());

        let panel = parse_minute_csv(csv.as_bytes(), SessionSpec::default(), "TEST").unwrap();
        assert_eq!(panel.days.len(), 2);
        assert_eq!(panel.days[0].date, NaiveDate::from_ymd_opt(2015, 1, 2).unwrap());
        assert_eq!(panel.days[1].date, NaiveDate::from_ymd_opt(2015, 1, 6).unwrap());
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let csv = "timestamp,price,volume\n2015-01-02T09:30:00,100.0,5\n2015-01-02T09:31:00,not_a_price,5\n";
        let err = parse_minute_csv(csv.as_bytes(), SessionSpec::default(), "TEST").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_price_is_a_parse_error() {
        let csv = "timestamp,price,volume\n2015-01-02T09:30:00,-3.0,5\n";
        assert!(matches!(
            parse_minute_csv(csv.as_bytes(), SessionSpec::default(), "TEST"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rows_outside_session_are_dropped() {
        let mut csv = constant_price_day_csv("2015-01-02", 100.0);
        csv.push_str("2015-01-02T09:15:00,999.0,10\n");
        csv.push_str("2015-01-02T16:30:00,999.0,10\n");
        let panel = parse_minute_csv(csv.as_bytes(), SessionSpec::default(), "TEST").unwrap();
        assert!(panel.days[0].log_prices.iter().all(|&lp| lp == 100.0f64.ln()));
    }

    #[test]
    fn export_import_round_trip_is_bit_exact() {
        // irrational prices exercise the shortest round-trip formatting
        let mut s = String::from("timestamp,price,volume\n");
        for minute in 0..=390u32 {
            let abs = 570 + minute;
            let price = 100.0 + (minute as f64 * 0.7).sin() * 3.0;
            s.push_str(&format!(
                "2015-01-02T{:02}:{:02}:00,{price},{}\n",
                abs / 60,
                abs % 60,
                minute
            ));
        }
        let panel = parse_minute_csv(s.as_bytes(), SessionSpec::default(), "TEST").unwrap();

        let mut buf = Vec::new();
        export_panel_csv(&panel, &mut buf).unwrap();
        let back = import_panel_csv(buf.as_slice(), "TEST").unwrap();

        assert_eq!(panel.days.len(), back.days.len());
        for (a, b) in panel.days.iter().zip(&back.days) {
            assert_eq!(a.date, b.date);
            assert!(a
                .log_prices
                .iter()
                .zip(&b.log_prices)
                .all(|(x, y)| x.to_bits() == y.to_bits()));
            assert!(a
                .volumes
                .iter()
                .zip(&b.volumes)
                .all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn gzip_input_parses() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        use std::io::Write as _;

        let csv = constant_price_day_csv("2015-01-02", 100.0);
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(csv.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bars.csv.gz");
        std::fs::write(&path, gz).unwrap();
        let panel = parse_minute_file(&path, SessionSpec::default(), "TEST").unwrap();
        assert_eq!(panel.days.len(), 1);
    }

    #[test]
    fn daily_return_examples() {
        let date = NaiveDate::from_ymd_opt(2015, 1, 2).unwrap();
        // S_0 = ln 100, S_390 = ln 101
        let mut lp = vec![100.0f64.ln(); 391];
        lp[390] = 101.0f64.ln();
        let day = IntradayDay::new(date, lp, vec![0.0; 390]).unwrap();
        assert_relative_eq!(daily_return(&day), (101.0f64 / 100.0).ln(), epsilon = 1e-15);

        // monotone grid S_i = 0.001 i
        let lp: Vec<f64> = (0..=390).map(|i| 0.001 * i as f64).collect();
        let day = IntradayDay::new(date, lp, vec![0.0; 390]).unwrap();
        assert_relative_eq!(daily_return(&day), 0.39, epsilon = 1e-12);
    }

    #[test]
    fn panel_rejects_non_increasing_dates() {
        let date = NaiveDate::from_ymd_opt(2015, 1, 2).unwrap();
        let day = IntradayDay::new(date, vec![0.0; 391], vec![0.0; 390]).unwrap();
        assert!(DayPanel::new("X", vec![day.clone(), day]).is_err());
    }
}
