//! Profile file writers. CSV renders every float with 17 significant digits
//! so values round-trip exactly; JSON relies on shortest-round-trip number
//! serialization for the same guarantee.

use std::io::Write;
use std::path::Path;

use marangoni_core::driver::Profile;
use serde_json::json;

use crate::config::OutputFormat;

pub fn write_profile(path: &Path, profile: &Profile, format: OutputFormat) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    match format {
        OutputFormat::Csv => {
            writeln!(file, "{}", profile.columns.join(","))?;
            for (i, &eta) in profile.etas.iter().enumerate() {
                write!(file, "{}", render(eta))?;
                for series in &profile.series {
                    write!(file, ",{}", render(series[i]))?;
                }
                writeln!(file)?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<Vec<f64>> = profile
                .etas
                .iter()
                .enumerate()
                .map(|(i, &eta)| {
                    std::iter::once(eta)
                        .chain(profile.series.iter().map(|s| s[i]))
                        .collect()
                })
                .collect();
            let doc = json!({
                "columns": profile.columns,
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut file, &doc)?;
            writeln!(file)?;
        }
    }
    Ok(())
}

/// 17-significant-digit scientific rendering.
fn render(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_roundtrips() {
        for x in [0.0, 1.0, -0.04691602733, 1.3046259583, 1e-300] {
            assert_eq!(render(x).parse::<f64>().unwrap(), x);
        }
    }
}
