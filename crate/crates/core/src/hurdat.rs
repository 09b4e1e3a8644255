//! HURDAT2 best-track records and their conversion to sphere curves.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use chrono::{Datelike, NaiveDate, NaiveDateTime, NaiveTime};
use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::homogeneous::{resample_sphere, SphereCurve};

#[derive(Clone, Debug, PartialEq)]
pub struct Fix {
    pub time: NaiveDateTime,
    /// Record identifier (`L` landfall, `I` intensity peak, ...), blank as `None`.
    pub record: Option<char>,
    pub status: String,
    pub lat: f64,
    /// Signed degrees, west negative, in `(−180, 180]`.
    pub lon: f64,
    /// Knots; `None` for the `-99` sentinel.
    pub wind: Option<i32>,
    /// Millibars; `None` for the `-999` sentinel.
    pub pressure: Option<i32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StormRecord {
    pub id: String,
    pub name: String,
    pub fixes: Vec<Fix>,
}

impl StormRecord {
    pub fn year(&self) -> Option<i32> {
        self.fixes.first().map(|f| f.time.year())
    }

    pub fn peak_wind(&self) -> Option<i32> {
        self.fixes.iter().filter_map(|f| f.wind).max()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn fields(line: &str) -> Vec<&str> {
    let mut f: Vec<&str> = line.split(',').map(str::trim).collect();
    while f.last() == Some(&"") {
        f.pop();
    }
    f
}

fn is_data_line(f: &[&str]) -> bool {
    f.first().is_some_and(|d| d.len() == 8 && d.bytes().all(|b| b.is_ascii_digit()))
}

fn parse_coord(s: &str, pos: char, neg: char, limit: f64, line: usize) -> Result<f64> {
    let hemi = s.chars().last().ok_or_else(|| parse_err(line, "empty coordinate"))?;
    let sign = if hemi == pos {
        1.0
    } else if hemi == neg {
        -1.0
    } else {
        return Err(parse_err(line, format!("coordinate {s:?} lacks a {pos}/{neg} suffix")));
    };
    let v: f64 = s[..s.len() - 1].trim().parse().map_err(|_| parse_err(line, format!("malformed coordinate {s:?}")))?;
    if !(0.0..=limit).contains(&v) {
        return Err(parse_err(line, format!("coordinate {s:?} out of range")));
    }
    Ok(sign * v)
}

fn parse_int(s: &str, what: &str, line: usize) -> Result<i32> {
    s.parse().map_err(|_| parse_err(line, format!("malformed {what} {s:?}")))
}

fn parse_fix(f: &[&str], line: usize) -> Result<Fix> {
    if f.len() < 8 {
        return Err(parse_err(line, format!("data line needs 8 fields, found {}", f.len())));
    }
    let date = NaiveDate::parse_from_str(f[0], "%Y%m%d").map_err(|_| parse_err(line, format!("bad date {:?}", f[0])))?;
    let time = NaiveTime::parse_from_str(f[1], "%H%M").map_err(|_| parse_err(line, format!("bad time {:?}", f[1])))?;
    let record = match f[2].chars().collect::<Vec<_>>()[..] {
        [] => None,
        [c] => Some(c),
        _ => return Err(parse_err(line, format!("bad record identifier {:?}", f[2]))),
    };
    let lat = parse_coord(f[4], 'N', 'S', 90.0, line)?;
    let mut lon = parse_coord(f[5], 'E', 'W', 180.0, line)?;
    if lon == -180.0 {
        lon = 180.0;
    }
    let wind = match parse_int(f[6], "maxwind", line)? {
        -99 => None,
        w if w < 0 => return Err(parse_err(line, format!("negative maxwind {w}"))),
        w => Some(w),
    };
    let pressure = match parse_int(f[7], "pressure", line)? {
        -999 => None,
        p => Some(p),
    };
    Ok(Fix { time: date.and_time(time), record, status: f[3].to_string(), lat, lon, wind, pressure })
}

/// Parses HURDAT2 text: header lines `ID, NAME, COUNT,` each followed by
/// `COUNT` data lines. Fields after the minimum pressure are ignored.
pub fn parse_hurdat2(text: &str) -> Result<Vec<StormRecord>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty()).peekable();
    while let Some((ln, line)) = lines.next() {
        let f = fields(line);
        if is_data_line(&f) {
            return Err(parse_err(ln, "data line outside a storm block"));
        }
        if f.len() != 3 {
            return Err(parse_err(ln, format!("header needs 3 fields, found {}", f.len())));
        }
        let count: usize = f[2].parse().map_err(|_| parse_err(ln, format!("bad fix count {:?}", f[2])))?;
        let mut fixes = Vec::with_capacity(count);
        for k in 0..count {
            let Some((dl, data)) = lines.next_if(|(_, l)| is_data_line(&fields(l))) else {
                return Err(parse_err(ln, format!("header announces {count} fixes, found {k}")));
            };
            let fix = parse_fix(&fields(data), dl)?;
            if fixes.last().is_some_and(|p: &Fix| p.time > fix.time) {
                return Err(parse_err(dl, "timestamps go backwards"));
            }
            fixes.push(fix);
        }
        if let Some((dl, _)) = lines.next_if(|(_, l)| is_data_line(&fields(l))) {
            return Err(parse_err(dl, format!("more than the {count} fixes announced on line {ln}")));
        }
        out.push(StormRecord { id: f[0].to_string(), name: f[1].to_string(), fixes });
    }
    Ok(out)
}

fn format_coord(v: f64, pos: char, neg: char) -> String {
    let a = v.abs();
    let h = if v < 0.0 { neg } else { pos };
    if ((a * 10.0).round() / 10.0) == a {
        format!("{a:.1}{h}")
    } else {
        format!("{a}{h}")
    }
}

/// Canonical HURDAT2 layout (column widths of the published file, extent
/// fields omitted).
pub fn serialize_hurdat2(records: &[StormRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{:<8},{:>19},{:>7},", r.id, r.name, r.fixes.len());
        for f in &r.fixes {
            let _ = writeln!(
                out,
                "{}, {},{:>2},{:>3},{:>6},{:>7},{:>4},{:>5},",
                f.time.format("%Y%m%d"),
                f.time.format("%H%M"),
                f.record.map(String::from).unwrap_or_default(),
                f.status,
                format_coord(f.lat, 'N', 'S'),
                format_coord(f.lon, 'E', 'W'),
                f.wind.unwrap_or(-99),
                f.pressure.unwrap_or(-999)
            );
        }
    }
    out
}

/// Saffir–Simpson category of a sustained wind in knots (0 below hurricane
/// strength).
pub fn category(wind_kt: i32) -> u8 {
    match wind_kt {
        w if w >= 137 => 5,
        w if w >= 113 => 4,
        w if w >= 96 => 3,
        w if w >= 83 => 2,
        w if w >= 64 => 1,
        _ => 0,
    }
}

/// Storms whose first fix falls in `years` and whose peak wind reaches
/// `min_category`.
pub fn filter_storms<'a>(records: &'a [StormRecord], years: RangeInclusive<i32>, min_category: u8) -> Vec<&'a StormRecord> {
    records
        .iter()
        .filter(|r| r.year().is_some_and(|y| years.contains(&y)))
        .filter(|r| min_category == 0 || r.peak_wind().is_some_and(|w| category(w) >= min_category))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackOptions {
    /// Samples after resampling.
    pub n: usize,
    /// Aux weight in radians per knot.
    pub lambda_w: f64,
    /// Fill missing winds linearly in time instead of dropping the fix.
    pub interpolate_missing: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self { n: 64, lambda_w: 0.01, interpolate_missing: false }
    }
}

pub fn lat_lon_to_unit(lat_deg: f64, lon_deg: f64) -> Vector3<f64> {
    let (phi, lam) = (lat_deg.to_radians(), lon_deg.to_radians());
    Vector3::new(phi.cos() * lam.cos(), phi.cos() * lam.sin(), phi.sin())
}

/// Usable `(point, wind)` pairs in time order, before resampling.
pub fn track_points(s: &StormRecord, interpolate_missing: bool) -> Vec<(Vector3<f64>, f64)> {
    let secs = |f: &Fix| f.time.and_utc().timestamp() as f64;
    let mut winds: Vec<Option<f64>> = s.fixes.iter().map(|f| f.wind.map(f64::from)).collect();
    if interpolate_missing {
        for i in 0..winds.len() {
            if winds[i].is_some() {
                continue;
            }
            let prev = (0..i).rev().find(|&k| s.fixes[k].wind.is_some());
            let next = (i + 1..winds.len()).find(|&k| s.fixes[k].wind.is_some());
            if let (Some(a), Some(b)) = (prev, next) {
                let (ta, tb, t) = (secs(&s.fixes[a]), secs(&s.fixes[b]), secs(&s.fixes[i]));
                let (wa, wb) = (s.fixes[a].wind.unwrap() as f64, s.fixes[b].wind.unwrap() as f64);
                let f = if tb > ta { (t - ta) / (tb - ta) } else { 0.0 };
                winds[i] = Some(wa + f * (wb - wa));
            }
        }
    }
    let mut out: Vec<(Vector3<f64>, f64)> = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (f, w) in s.fixes.iter().zip(winds) {
        let Some(w) = w else { continue };
        if last == Some((f.lat, f.lon)) {
            continue;
        }
        last = Some((f.lat, f.lon));
        out.push((lat_lon_to_unit(f.lat, f.lon), w));
    }
    out
}

/// Track as a sphere curve with aux `λ_w · maxwind`, resampled uniformly
/// in arc length.
pub fn track_to_curve(s: &StormRecord, opts: &TrackOptions) -> Result<SphereCurve> {
    let pts = track_points(s, opts.interpolate_missing);
    if pts.len() < 3 {
        return Err(Error::TrackTooShort { usable: pts.len() });
    }
    let (points, aux): (Vec<_>, Vec<_>) = pts.into_iter().map(|(p, w)| (p, opts.lambda_w * w)).unzip();
    resample_sphere(&SphereCurve::new(points, Some(aux))?, opts.n)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KARL_HEAD: &str = "AL092010,            KARL,     26,";
    const KARL_FIX: &str = "20100914, 1200,  , TS, 19.8N,  85.7W,  35, 1000,";

    fn karl() -> String {
        let mut s = format!("{KARL_HEAD}\n");
        for k in 0..26 {
            let (d, h) = (14 + k / 4, (k % 4) * 6);
            let _ = writeln!(s, "201009{d:02}, {h:02}00,  , TS, {:.1}N,  {:.1}W,  {}, 1000,    0,    0,", 19.0 + 0.1 * k as f64, 85.0 + 0.2 * k as f64, 35 + k);
        }
        s
    }

    #[test]
    fn parses_a_full_block() {
        let r = parse_hurdat2(&karl()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].id, "AL092010");
        assert_eq!(r[0].name, "KARL");
        assert_eq!(r[0].fixes.len(), 26);
        assert_eq!(r[0].year(), Some(2010));
    }

    #[test]
    fn parses_a_single_data_line() {
        let r = parse_hurdat2(&format!("AL092010,            KARL,      1,\n{KARL_FIX}\n")).unwrap();
        let f = &r[0].fixes[0];
        assert_eq!(f.lat, 19.8);
        assert_eq!(f.lon, -85.7);
        assert_eq!(f.wind, Some(35));
        assert_eq!(f.pressure, Some(1000));
        assert_eq!(f.status, "TS");
        assert_eq!(f.record, None);
        assert_eq!(f.time, NaiveDate::from_ymd_opt(2010, 9, 14).unwrap().and_hms_opt(12, 0, 0).unwrap());
    }

    #[test]
    fn sentinels_become_missing() {
        let text = "AL011851,            UNNAMED,      1,\n18510625, 0000,  , HU, 28.0N,  94.8W, -99, -999,\n";
        let f = &parse_hurdat2(text).unwrap()[0].fixes[0];
        assert_eq!((f.wind, f.pressure), (None, None));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let short = format!("{KARL_HEAD}\n{KARL_FIX}\n");
        assert!(matches!(parse_hurdat2(&short), Err(Error::Parse { line: 1, .. })));
        let bad = "AL092010, KARL, 1,\n20100914, 1200,  , TS, 19.8Q,  85.7W,  35, 1000,\n";
        assert!(matches!(parse_hurdat2(bad), Err(Error::Parse { line: 2, .. })));
        let back = "AL092010, KARL, 2,\n20100914, 1200,  , TS, 19.8N,  85.7W,  35, 1000,\n20100914, 0600,  , TS, 19.8N,  85.7W,  35, 1000,\n";
        assert!(matches!(parse_hurdat2(back), Err(Error::Parse { line: 3, .. })));
        let extra = "AL092010, KARL, 1,\n20100914, 1200,  , TS, 19.8N,  85.7W,  35, 1000,\n20100914, 1800,  , TS, 19.8N,  85.7W,  35, 1000,\n";
        assert!(matches!(parse_hurdat2(extra), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn canonical_layout_matches_the_published_columns() {
        let r = parse_hurdat2(&format!("AL092010,            KARL,      1,\n{KARL_FIX}   0,\n")).unwrap();
        let text = serialize_hurdat2(&r);
        assert_eq!(text, format!("AL092010,               KARL,      1,\n{KARL_FIX}\n"));
        assert_eq!(parse_hurdat2(&text).unwrap(), r);
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let r = parse_hurdat2(&karl()).unwrap();
        let once = serialize_hurdat2(&r);
        assert_eq!(parse_hurdat2(&once).unwrap(), r);
        assert_eq!(serialize_hurdat2(&parse_hurdat2(&once).unwrap()), once);
    }

    #[test]
    fn category_boundaries() {
        assert_eq!(category(136), 4);
        assert_eq!(category(137), 5);
        assert_eq!(category(140), 5);
        assert_eq!(category(63), 0);
        assert_eq!(category(64), 1);
    }

    #[test]
    fn filter_by_peak_and_year() {
        let mk = |id: &str, year: i32, peak: i32| {
            let f = |w| Fix {
                time: NaiveDate::from_ymd_opt(year, 8, 1).unwrap().and_hms_opt(0, 0, 0).unwrap(),
                record: None,
                status: "HU".into(),
                lat: 20.0,
                lon: -60.0,
                wind: Some(w),
                pressure: None,
            };
            StormRecord { id: id.into(), name: "X".into(), fixes: vec![f(50), f(peak)] }
        };
        let storms = vec![mk("A", 2005, 140), mk("B", 2005, 136), mk("C", 1990, 150)];
        let five: Vec<_> = filter_storms(&storms, 2000..=2010, 5).iter().map(|r| r.id.clone()).collect();
        assert_eq!(five, vec!["A"]);
        assert!(filter_storms(&[], 0..=3000, 5).is_empty());
        assert_eq!(filter_storms(&storms, 0..=3000, 0).len(), 3);
    }

    #[test]
    fn positions_map_to_the_sphere() {
        assert!((lat_lon_to_unit(0.0, 0.0) - Vector3::x()).norm() < 1e-15);
        assert!((lat_lon_to_unit(90.0, 0.0) - Vector3::z()).norm() < 1e-15);
    }

    #[test]
    fn equator_track_has_constant_aux_and_speed() {
        let fixes: Vec<_> = (0..12)
            .map(|k| Fix {
                time: NaiveDate::from_ymd_opt(2000, 9, 1 + k / 4).unwrap().and_hms_opt(6 * (k % 4), 0, 0).unwrap(),
                record: None,
                status: "TS".into(),
                lat: 0.0,
                lon: -80.0 + (k * k) as f64 * 0.3,
                wind: Some(10),
                pressure: None,
            })
            .collect();
        let storm = StormRecord { id: "AL012000".into(), name: "EQ".into(), fixes };
        let c = track_to_curve(&storm, &TrackOptions { n: 40, ..Default::default() }).unwrap();
        assert!(c.aux().unwrap().iter().all(|a| (a - 0.1).abs() < 1e-12));
        assert!(c.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        let v = c.spherical_speed();
        assert!(v.iter().all(|s| (s - v[0]).abs() < 1e-6));
    }

    #[test]
    fn duplicates_and_missing_winds_are_dropped() {
        let text = "AL012000, T, 5,\n20000901, 0000,  , TS, 10.0N,  50.0W,  30, 1000,\n20000901, 0600,  , TS, 10.0N,  50.0W,  35, 1000,\n20000901, 1200,  , TS, 10.5N,  51.0W, -99, 1000,\n20000901, 1800,  , TS, 11.0N,  52.0W,  40, 1000,\n20000902, 0000,  , TS, 11.5N,  53.0W,  45, 1000,\n";
        let s = &parse_hurdat2(text).unwrap()[0];
        assert_eq!(track_points(s, false).len(), 3);
        let filled = track_points(s, true);
        assert_eq!(filled.len(), 4);
        // the repeated position keeps its first fix, so the gap fills between 30 and 40 kt
        assert!((filled[1].1 - 37.5).abs() < 1e-12);
        let tiny = "AL012000, T, 2,\n20000901, 0000,  , TS, 10.0N,  50.0W,  30, 1000,\n20000901, 0600,  , TS, 11.0N,  50.0W,  35, 1000,\n";
        let s = &parse_hurdat2(tiny).unwrap()[0];
        assert_eq!(track_to_curve(s, &TrackOptions::default()), Err(Error::TrackTooShort { usable: 2 }));
    }
}
