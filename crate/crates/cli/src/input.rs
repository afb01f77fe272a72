//! Flag values and flat-file readers.

use std::path::Path;

use wcs_core::dro::LabeledDataset;
use wcs_core::{Phi, Scenario, UncertaintyFamily};

use crate::CliError;

pub fn parse_list(flag: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{flag}: cannot parse '{t}' as a number"))))
        .collect()
}

/// `start:stop:count`, geometrically spaced and inclusive of both ends.
pub fn parse_geom(raw: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--eps-geom: expected start:stop:count with 0 < start, got '{raw}'"));
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(start > 0.0 && stop > 0.0) || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let ratio = (stop / start).powf(1.0 / (count - 1) as f64);
    Ok((0..count).map(|k| if k == count - 1 { stop } else { start * ratio.powi(k as i32) }).collect())
}

pub fn family(name: &str, phi: &str, alpha: f64) -> Result<UncertaintyFamily, CliError> {
    let phi = || Phi::from_name(phi).ok_or_else(|| CliError::Usage(format!("--phi: unknown divergence '{phi}'")));
    Ok(match name {
        "phi" => UncertaintyFamily::SmoothPhi { phi: phi()? },
        "penalty-phi" => UncertaintyFamily::PenaltyPhi { phi: phi()? },
        "tv" => UncertaintyFamily::TotalVariation,
        "budgeted" => UncertaintyFamily::Budgeted,
        "combo" => UncertaintyFamily::Combination { alpha },
        "box" => UncertaintyFamily::SymmetricBox,
        "wasserstein" => UncertaintyFamily::WassersteinL1,
        other => return Err(CliError::Usage(format!("--family: unknown family '{other}'"))),
    })
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header = rdr.headers().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?.iter().map(str::to_string).collect();
    let mut rows = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

fn number(path: &Path, line: usize, raw: &str) -> Result<f64, CliError> {
    raw.parse().map_err(|_| CliError::Io(format!("{}: row {line}: cannot parse '{raw}'", path.display())))
}

/// Two-column file `<first>[,prob]`; a missing prob column means uniform.
pub fn read_weighted(path: &Path, first: &str) -> Result<Scenario, CliError> {
    let (header, rows) = read_table(path)?;
    let ok = match header.len() {
        1 => header[0] == first,
        2 => header[0] == first && header[1] == "prob",
        _ => false,
    };
    if !ok {
        return Err(CliError::Io(format!("{}: header must be '{first}' or '{first},prob'", path.display())));
    }
    let mut values = vec![];
    let mut probs = vec![];
    for (i, row) in rows.iter().enumerate() {
        values.push(number(path, i + 1, &row[0])?);
        if header.len() == 2 {
            probs.push(number(path, i + 1, &row[1])?);
        }
    }
    Ok(Scenario::new(values, if header.len() == 2 { Some(probs) } else { None })?)
}

/// `label,x1..xd` with labels `+1`/`-1`.
pub fn read_classification(path: &Path) -> Result<LabeledDataset, CliError> {
    let (header, rows) = read_table(path)?;
    if header.len() < 2 || header[0] != "label" {
        return Err(CliError::Io(format!("{}: header must be 'label,x1,...,xd'", path.display())));
    }
    let mut features = vec![];
    let mut labels = vec![];
    for (i, row) in rows.iter().enumerate() {
        labels.push(number(path, i + 1, &row[0])?);
        features.push(row[1..].iter().map(|v| number(path, i + 1, v)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(LabeledDataset::new(features, labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_sweeps() {
        assert_eq!(parse_list("--costs", "1, 5,3").unwrap(), vec![1.0, 5.0, 3.0]);
        assert!(parse_list("--costs", "1,x").is_err());
        let g = parse_geom("0.01:1:3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 0.1).abs() < 1e-15 && g[2] == 1.0);
        assert!(parse_geom("0:1:3").is_err());
    }

    #[test]
    fn family_names() {
        assert_eq!(family("tv", "chi2", 0.9).unwrap(), UncertaintyFamily::TotalVariation);
        assert_eq!(family("phi", "kl", 0.9).unwrap(), UncertaintyFamily::SmoothPhi { phi: Phi::Kl });
        assert!(family("phi", "hellinger", 0.9).is_err());
        assert!(family("nope", "chi2", 0.9).is_err());
    }
}
