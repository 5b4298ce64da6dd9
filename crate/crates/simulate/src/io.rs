//! Ensemble persistence: a flat little-endian binary file
//! (header `d, N, M, dt, seed`, then site-major `sites × (M+1)` doubles)
//! with a JSON sidecar carrying the model, environment, and integrator
//! metadata, plus a CSV export of per-time summary statistics.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ldp_model::ModelSpec;
use ldp_numerics::stats::{ksum_iter, mean};
use serde::{Deserialize, Serialize};

use crate::ensemble::PathEnsemble;
use crate::environment::EnvironmentSample;
use crate::SimulateError;

#[derive(Serialize, Deserialize)]
struct Sidecar {
    spec: ModelSpec,
    scheme: String,
    seed: u64,
    steps: usize,
    dt: f64,
    env_dim: usize,
    env_values: Vec<f64>,
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut p = base.as_os_str().to_owned();
    p.push(ext);
    PathBuf::from(p)
}

/// Writes `<base>.bin` and `<base>.json`; returns the two paths.
pub fn write_ensemble(ens: &PathEnsemble, base: &Path) -> Result<(PathBuf, PathBuf), SimulateError> {
    let bin_path = with_ext(base, ".bin");
    let json_path = with_ext(base, ".json");

    let mut w = BufWriter::new(File::create(&bin_path)?);
    w.write_all(&(ens.spec.lattice.d as u32).to_le_bytes())?;
    w.write_all(&(ens.spec.lattice.n as u32).to_le_bytes())?;
    w.write_all(&(ens.steps as u64).to_le_bytes())?;
    w.write_all(&ens.dt.to_le_bytes())?;
    w.write_all(&ens.seed.to_le_bytes())?;
    let m = ens.num_times();
    for k in 0..ens.sites() {
        for j in 0..m {
            w.write_all(&ens.theta(k, j).to_le_bytes())?;
        }
    }
    w.flush()?;

    let sidecar = Sidecar {
        spec: ens.spec.clone(),
        scheme: ens.scheme.clone(),
        seed: ens.seed,
        steps: ens.steps,
        dt: ens.dt,
        env_dim: ens.env.env_dim,
        env_values: ens.env.values.clone(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(&json_path)?), &sidecar)?;
    Ok((bin_path, json_path))
}

fn read_u32(r: &mut impl Read) -> Result<u32, SimulateError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64, SimulateError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Reads `<base>.bin` + `<base>.json` back into an ensemble, checking the
/// header against the sidecar.
pub fn read_ensemble(base: &Path) -> Result<PathEnsemble, SimulateError> {
    let sidecar: Sidecar = serde_json::from_reader(BufReader::new(File::open(with_ext(base, ".json"))?))?;
    let mut r = BufReader::new(File::open(with_ext(base, ".bin"))?);
    let d = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let steps = read_u64(&mut r)? as usize;
    let dt = f64::from_le_bytes(read_u64(&mut r)?.to_le_bytes());
    let seed = read_u64(&mut r)?;
    if d != sidecar.spec.lattice.d || n != sidecar.spec.lattice.n || steps != sidecar.steps || seed != sidecar.seed {
        return Err(SimulateError::Corrupt("binary header disagrees with sidecar".into()));
    }
    let sites = sidecar.spec.lattice.num_sites();
    let m = steps + 1;
    let mut site_major = vec![0u8; sites * m * 8];
    r.read_exact(&mut site_major)?;
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(SimulateError::Corrupt("trailing bytes after spin block".into()));
    }
    let mut thetas = vec![0.0; sites * m];
    for k in 0..sites {
        for j in 0..m {
            let at = (k * m + j) * 8;
            let bits: [u8; 8] = site_major[at..at + 8].try_into().unwrap();
            thetas[j * sites + k] = f64::from_le_bytes(bits);
        }
    }
    let positions = PathEnsemble::positions_of(&sidecar.spec);
    Ok(PathEnsemble {
        env: EnvironmentSample { env_dim: sidecar.env_dim, values: sidecar.env_values },
        steps,
        dt,
        seed,
        scheme: sidecar.scheme,
        positions,
        thetas,
        spec: sidecar.spec,
    })
}

/// Per-time summary rows `time, mean, variance, phi` (φ = 1 + second moment).
pub fn write_summary_csv(ens: &PathEnsemble, path: &Path) -> Result<(), SimulateError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["time", "mean_theta", "var_theta", "phi"])?;
    let sites = ens.sites() as f64;
    for j in 0..ens.num_times() {
        let s = ens.slice(j);
        let m = mean(s);
        let second = ksum_iter(s.iter().map(|&t| t * t)) / sites;
        let var = second - m * m;
        w.serialize((ens.time(j), m, var, 1.0 + second))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::simulate_interacting;
    use ldp_model::{EnvironmentSpec, InitialSpec, KernelSpec, ModelSpec, PotentialSpec, TorusLattice};

    fn small_run() -> PathEnsemble {
        let spec = ModelSpec {
            lattice: TorusLattice::new(2, 3),
            potential: PotentialSpec::harmonic(),
            kernel: KernelSpec::constant(0.1),
            environment: EnvironmentSpec::frozen(vec![0.25]),
            initial: InitialSpec::gaussian(0.0, 0.2),
            sigma: 0.8,
            horizon: 0.25,
        };
        simulate_interacting(&spec, 8, 4242).unwrap()
    }

    #[test]
    fn binary_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ens = small_run();
        let base = dir.path().join("run0");
        let (bin, json) = write_ensemble(&ens, &base).unwrap();
        assert!(bin.ends_with("run0.bin") && json.ends_with("run0.json"));
        let back = read_ensemble(&base).unwrap();
        assert_eq!(back.thetas, ens.thetas);
        assert_eq!(back.env, ens.env);
        assert_eq!(back.dt.to_bits(), ens.dt.to_bits());
        assert_eq!(back.seed, ens.seed);
        assert_eq!(back.scheme, ens.scheme);
    }

    #[test]
    fn summary_csv_has_one_row_per_time() {
        let dir = tempfile::tempdir().unwrap();
        let ens = small_run();
        let path = dir.path().join("summary.csv");
        write_summary_csv(&ens, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + ens.num_times());
        assert_eq!(lines[0], "time,mean_theta,var_theta,phi");
        assert!(lines[1].starts_with("0.0,"));
    }

    #[test]
    fn corrupt_header_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let ens = small_run();
        let base = dir.path().join("run1");
        write_ensemble(&ens, &base).unwrap();
        // flip the seed in the binary header
        let bin = with_ext(&base, ".bin");
        let mut bytes = std::fs::read(&bin).unwrap();
        bytes[24] ^= 0xFF;
        std::fs::write(&bin, &bytes).unwrap();
        assert!(matches!(read_ensemble(&base), Err(SimulateError::Corrupt(_))));
    }
}
