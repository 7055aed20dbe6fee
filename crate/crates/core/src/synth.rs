//! Seeded synthetic premium dataset: ten companies, monthly series from
//! April 2003 through December 2017 (177 months), drawn from GEV models
//! at realistic premium scales. The bundled `data/synthetic_premiums.csv`
//! is exactly the seed-42 output of [`write_synthetic_csv`], and the
//! `synth` CLI subcommand regenerates it.

use std::fmt::Write as _;
use std::path::Path;

use crate::distributions::{quantile, DistributionModel};
use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// Company name with the generating GEV (shape, scale, location).
pub const COMPANIES: [(&str, f64, f64, f64); 10] = [
    ("Royal Sundaram", 0.368, 30.848, 53.335),
    ("Tata-AIG", 0.625, 36.772, 57.601),
    ("Reliance General", 0.008, 66.970, 117.728),
    ("IFFCO-Tokio", 0.378, 57.462, 84.508),
    ("ICICI-Lombard", 0.264, 153.200, 190.516),
    ("Bajaj Allianz", 0.285, 98.745, 139.234),
    ("HDFC CHUBB", 0.706, 82.215, 84.998),
    ("Cholamandalam", 0.685, 33.423, 49.846),
    ("New India", 0.198, 131.428, 160.477),
    ("National", 0.053, 130.343, 138.016),
];

pub const PERIOD_START: (i32, u32) = (2003, 4);
pub const PERIOD_END: (i32, u32) = (2017, 12);
pub const MONTHS: usize = 177;

fn months() -> Vec<String> {
    let mut out = Vec::with_capacity(MONTHS);
    let (mut y, mut m) = PERIOD_START;
    loop {
        out.push(format!("{y:04}-{m:02}"));
        if (y, m) == PERIOD_END {
            break;
        }
        if m == 12 {
            y += 1;
            m = 1;
        } else {
            m += 1;
        }
    }
    out
}

/// One company's monthly draws. Nonpositive draws (possible in the lower
/// GEV tail) are redrawn so the series stays a valid premium sample.
fn company_series(model: &DistributionModel, rng: &mut SeededRng) -> Vec<f64> {
    let mut out = Vec::with_capacity(MONTHS);
    while out.len() < MONTHS {
        let x = quantile(model, rng.next_f64()).expect("uniform in (0,1)");
        if x >= 0.01 {
            out.push(x);
        }
    }
    out
}

/// Render the full synthetic dataset as CSV text.
pub fn synthetic_csv(seed: u64) -> String {
    let periods = months();
    let mut out = String::from("company,period,premium\n");
    for (idx, (name, shape, scale, location)) in COMPANIES.iter().enumerate() {
        let model = DistributionModel::gev(*shape, *location, *scale)
            .expect("generator parameters are valid");
        let mut rng = SeededRng::new(seed, idx as u64);
        let values = company_series(&model, &mut rng);
        for (period, value) in periods.iter().zip(values) {
            let _ = writeln!(out, "{name},{period},{value:.3}");
        }
    }
    out
}

/// Write the synthetic dataset to `path`.
pub fn write_synthetic_csv(path: impl AsRef<Path>, seed: u64) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, synthetic_csv(seed)).map_err(|e| Error::io(path, e))
}
