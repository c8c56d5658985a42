//! CSV dialect: comma separator, `.` decimal point, LF line endings, a
//! mandatory header row. Floats are written with 17 significant digits so
//! every value reads back bit-identical.

use std::io::Write;

use crate::electrostatics::{CalibrationResult, CalibrationSample};
use crate::error::{Error, Result};
use crate::lateral::ValidityFlags;
use crate::pipeline::{ConfidenceInterval, PowerLawFit, ScanSet, SineFit};

pub const CALIBRATION_HEADER: [&str; 2] = ["v1_volts", "deflection"];
pub const FORCE_CURVE_HEADER: [&str; 5] = ["z_m", "f_lateral_n", "bracket_factor", "beta", "flags"];
pub const AMPLITUDE_HEADER: [&str; 2] = ["z_m", "amplitude_n"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_line<W: Write>(out: &mut W, fields: &[String]) -> Result<()> {
    out.write_all(fields.join(",").as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// A numeric table read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Parses an all-numeric CSV table. `expected_header`, when given, must match
/// the file's header exactly.
pub fn read_table(text: &str, expected_header: Option<&[&str]>) -> Result<Table> {
    let (header, records) = read_records(text, expected_header)?;
    let rows = records
        .iter()
        .map(|(line, record)| {
            record
                .iter()
                .enumerate()
                .map(|(j, cell)| parse_cell(cell, *line, &header, j))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header, rows })
}

type Records = (Vec<String>, Vec<(u64, ::csv::StringRecord)>);

fn read_records(text: &str, expected_header: Option<&[&str]>) -> Result<Records> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_error(&e, 1))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse {
            line: 1,
            column: String::new(),
            message: "missing header row".into(),
        });
    }
    if let Some(expected) = expected_header {
        if header != expected {
            return Err(Error::Parse {
                line: 1,
                column: String::new(),
                message: format!("expected header `{}`, found `{}`", expected.join(","), header.join(",")),
            });
        }
    }
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(&e, 0))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        records.push((line, record));
    }
    Ok((header, records))
}

fn parse_cell(cell: &str, line: u64, header: &[String], j: usize) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        column: header.get(j).cloned().unwrap_or_else(|| j.to_string()),
        message: format!("`{cell}` is not a number"),
    })
}

fn parse_error(e: &::csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    Error::Parse {
        line,
        column: String::new(),
        message: e.to_string(),
    }
}

pub fn write_scan_set<W: Write>(out: &mut W, scans: &ScanSet) -> Result<()> {
    let mut head = vec!["displacement_m".to_string()];
    head.extend((0..scans.n_scans()).map(|i| format!("scan_{i}")));
    head.push("mean".to_string());
    write_line(out, &head)?;
    for (j, x) in scans.displacements().iter().enumerate() {
        let mut fields = vec![fmt_f64(*x)];
        fields.extend(scans.forces().iter().map(|row| fmt_f64(row[j])));
        fields.push(fmt_f64(scans.mean_force()[j]));
        write_line(out, &fields)?;
    }
    Ok(())
}

pub fn read_scan_set(text: &str) -> Result<ScanSet> {
    let table = read_table(text, None)?;
    let n = table.header.len();
    let shape_ok = n >= 2
        && table.header[0] == "displacement_m"
        && table.header[n - 1] == "mean"
        && table.header[1..n - 1]
            .iter()
            .enumerate()
            .all(|(i, h)| *h == format!("scan_{i}"));
    if !shape_ok {
        return Err(Error::Parse {
            line: 1,
            column: String::new(),
            message: "expected header `displacement_m,scan_0,...,scan_{n-1},mean`".into(),
        });
    }
    let displacements = table.rows.iter().map(|r| r[0]).collect();
    let forces = (1..n - 1)
        .map(|j| table.rows.iter().map(|r| r[j]).collect())
        .collect();
    ScanSet::new(displacements, forces)
}

pub fn write_calibration_samples<W: Write>(out: &mut W, samples: &[CalibrationSample]) -> Result<()> {
    write_line(out, &header(&CALIBRATION_HEADER))?;
    for s in samples {
        write_line(out, &[fmt_f64(s.voltage), fmt_f64(s.deflection)])?;
    }
    Ok(())
}

pub fn read_calibration_samples(text: &str) -> Result<Vec<CalibrationSample>> {
    let table = read_table(text, Some(&CALIBRATION_HEADER))?;
    Ok(table
        .rows
        .iter()
        .map(|r| CalibrationSample {
            voltage: r[0],
            deflection: r[1],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceCurveRow {
    pub z: f64,
    pub force: f64,
    pub bracket_factor: f64,
    pub beta: f64,
    pub flags: ValidityFlags,
}

pub fn write_force_curve<W: Write>(out: &mut W, rows: &[ForceCurveRow]) -> Result<()> {
    write_line(out, &header(&FORCE_CURVE_HEADER))?;
    for r in rows {
        write_line(
            out,
            &[
                fmt_f64(r.z),
                fmt_f64(r.force),
                fmt_f64(r.bracket_factor),
                fmt_f64(r.beta),
                r.flags.names().join(";"),
            ],
        )?;
    }
    Ok(())
}

pub fn read_force_curve(text: &str) -> Result<Vec<ForceCurveRow>> {
    let (header, records) = read_records(text, Some(&FORCE_CURVE_HEADER))?;
    records
        .iter()
        .map(|(line, r)| {
            let num = |j: usize| parse_cell(&r[j], *line, &header, j);
            let flags = ValidityFlags::from_names(r[4].split(';').filter(|s| !s.is_empty()))
                .map_err(|message| Error::Parse {
                    line: *line,
                    column: "flags".into(),
                    message,
                })?;
            Ok(ForceCurveRow {
                z: num(0)?,
                force: num(1)?,
                bracket_factor: num(2)?,
                beta: num(3)?,
                flags,
            })
        })
        .collect()
}

pub fn write_amplitudes<W: Write>(out: &mut W, separations: &[f64], amplitudes: &[f64]) -> Result<()> {
    write_line(out, &header(&AMPLITUDE_HEADER))?;
    for (z, a) in separations.iter().zip(amplitudes) {
        write_line(out, &[fmt_f64(*z), fmt_f64(*a)])?;
    }
    Ok(())
}

/// Header plus one data row.
pub fn write_record<W: Write>(out: &mut W, fields: &[(&str, f64)]) -> Result<()> {
    write_line(out, &fields.iter().map(|(k, _)| k.to_string()).collect::<Vec<_>>())?;
    write_line(out, &fields.iter().map(|(_, v)| fmt_f64(*v)).collect::<Vec<_>>())
}

pub fn power_law_record(fit: &PowerLawFit) -> [(&'static str, f64); 3] {
    [
        ("slope", fit.slope),
        ("intercept", fit.intercept),
        ("slope_stderr", fit.slope_stderr),
    ]
}

pub fn calibration_record(r: &CalibrationResult) -> [(&'static str, f64); 3] {
    [
        ("spring_constant_n_per_m", r.spring_constant),
        ("residual_potential_v", r.residual_potential),
        ("fit_residual", r.fit_residual),
    ]
}

pub fn scan_fit_record(
    fit: &SineFit,
    inverted_z: f64,
    ci: &ConfidenceInterval,
) -> [(&'static str, f64); 11] {
    [
        ("amplitude_n", fit.amplitude),
        ("phase_rad", fit.phase),
        ("offset_n", fit.offset),
        ("rms_residual_n", fit.rms_residual),
        ("inverted_z_m", inverted_z),
        ("mean_amplitude_n", ci.mean_amplitude),
        ("sigma_mean_n", ci.sigma_mean),
        ("systematic_n", ci.systematic),
        ("student_t", ci.student_t),
        ("delta_total_n", ci.delta_total),
        ("confidence_level", ci.confidence_level),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scan_set_round_trip() {
        let set = ScanSet::new(
            vec![0.0, 4.6e-10, 9.2e-10],
            vec![vec![1e-13, -2e-13, 3.3e-13], vec![0.1 + 0.2, f64::MIN_POSITIVE, -0.0]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_scan_set(&mut buf, &set).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("displacement_m,scan_0,scan_1,mean\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_scan_set(&text).unwrap(), set);
    }

    #[test]
    fn calibration_parse_errors() {
        let err = read_calibration_samples("v1_volts,deflection\n0.1,2e-9\n0.2,abc\n").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "deflection");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            read_calibration_samples("volts,defl\n0.1,2e-9\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_calibration_samples("v1_volts,deflection\n0.1,2e-9,7\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn force_curve_header_only() {
        let mut buf = Vec::new();
        write_force_curve(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "z_m,f_lateral_n,bracket_factor,beta,flags\n");
    }

    #[test]
    fn force_curve_flags_column() {
        let mut buf = Vec::new();
        let row = ForceCurveRow {
            z: 1e-7,
            force: 1.0,
            bracket_factor: 0.5,
            beta: 0.1,
            flags: ValidityFlags {
                below_plasma_wavelength: true,
                pft_marginal: true,
            },
        };
        write_force_curve(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",below_plasma_wavelength;pft_marginal"));
        let clean = ForceCurveRow {
            flags: ValidityFlags::default(),
            force: -3.3e-13 / 7.0,
            ..row
        };
        let mut buf = Vec::new();
        write_force_curve(&mut buf, &[row, clean]).unwrap();
        let back = read_force_curve(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, vec![row, clean]);
    }

    #[test]
    fn force_curve_unknown_flag_rejected() {
        let text = "z_m,f_lateral_n,bracket_factor,beta,flags\n1e-7,1,1,0.1,weird\n";
        match read_force_curve(text) {
            Err(Error::Parse { line: 2, column, .. }) => assert_eq!(column, "flags"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn record_round_trip() {
        let fit = PowerLawFit {
            slope: 4.05,
            intercept: -92.1,
            slope_stderr: 0.01,
        };
        let mut buf = Vec::new();
        write_record(&mut buf, &power_law_record(&fit)).unwrap();
        let t = read_table(std::str::from_utf8(&buf).unwrap(), Some(&["slope", "intercept", "slope_stderr"])).unwrap();
        assert_eq!(t.rows, vec![vec![4.05, -92.1, 0.01]]);
    }

    proptest! {
        #[test]
        fn floats_survive_text(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
