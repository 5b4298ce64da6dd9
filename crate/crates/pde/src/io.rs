//! On-disk form of a solved flow: raw little-endian densities next to a JSON
//! sidecar with the grids and times, plus a CSV of spin moment curves.

use crate::density::GridDensityPath;
use crate::grid::{SpaceEnvGrid, ThetaGrid};
use crate::PdeError;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct Sidecar {
    theta: ThetaGrid,
    space: SpaceEnvGrid,
    times: Vec<f64>,
    clip_count: usize,
}

/// Writes `base.bin` (header + densities) and `base.json` (grids and times).
pub fn write_density(path: &GridDensityPath, base: &Path) -> Result<(), PdeError> {
    let sidecar = Sidecar {
        theta: path.theta.clone(),
        space: path.space.clone(),
        times: path.times.clone(),
        clip_count: path.clip_count,
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(base.with_extension("json"))?), &sidecar)?;

    let mut w = BufWriter::new(File::create(base.with_extension("bin"))?);
    w.write_all(&(path.space.nx as u32).to_le_bytes())?;
    w.write_all(&(path.theta.n_theta as u32).to_le_bytes())?;
    w.write_all(&(path.times.len() as u64).to_le_bytes())?;
    w.write_all(&path.theta.theta_max.to_le_bytes())?;
    for v in &path.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a flow written by [`write_density`], cross-checking header and
/// sidecar.
pub fn read_density(base: &Path) -> Result<GridDensityPath, PdeError> {
    let sidecar: Sidecar = serde_json::from_reader(BufReader::new(File::open(base.with_extension("json"))?))?;
    let mut r = BufReader::new(File::open(base.with_extension("bin"))?);
    let mut u32buf = [0u8; 4];
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u32buf)?;
    let nx = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf)?;
    let n_theta = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u64buf)?;
    let n_times = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let theta_max = f64::from_le_bytes(u64buf);
    if nx != sidecar.space.nx
        || n_theta != sidecar.theta.n_theta
        || n_times != sidecar.times.len()
        || theta_max != sidecar.theta.theta_max
    {
        return Err(PdeError::Corrupt("binary header disagrees with sidecar".into()));
    }
    let expected = n_times * sidecar.space.total_fibers() * n_theta;
    let mut values = Vec::with_capacity(expected);
    for _ in 0..expected {
        r.read_exact(&mut u64buf)?;
        values.push(f64::from_le_bytes(u64buf));
    }
    if r.read(&mut u64buf[..1])? != 0 {
        return Err(PdeError::Corrupt("trailing bytes after density block".into()));
    }
    Ok(GridDensityPath {
        theta: sidecar.theta,
        space: sidecar.space,
        times: sidecar.times,
        values,
        clip_count: sidecar.clip_count,
    })
}

/// Spin moment curves of the flow: one row per stored time.
pub fn write_moments_csv(path: &GridDensityPath, file: &Path) -> Result<(), PdeError> {
    let mut w = csv::Writer::from_path(file)?;
    w.write_record(["time", "mean_theta", "var_theta", "mass_defect"])?;
    for j in 0..path.num_times() {
        let (m, v) = path.mean_var_at(j);
        let mut defect = 0.0f64;
        for i in 0..path.space.nx {
            let base = path.space.fiber_offset(i);
            let mass: f64 = (0..path.space.num_nodes(i))
                .map(|q| path.space.node(i, q).1 * path.fiber_mass(j, base + q))
                .sum();
            defect = defect.max((mass - 1.0).abs());
        }
        w.write_record([
            format!("{}", path.times[j]),
            format!("{m}"),
            format!("{v}"),
            format!("{defect:e}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::initial_slice;
    use crate::grid::Boundary;
    use crate::mv::solve_mckean_vlasov;
    use ldp_model::{EnvironmentSpec, InitialSpec, KernelSpec, ModelSpec, PotentialSpec, TorusLattice};

    fn small_flow() -> GridDensityPath {
        let spec = ModelSpec {
            lattice: TorusLattice { d: 1, n: 8 },
            potential: PotentialSpec::harmonic(),
            kernel: KernelSpec::constant(0.2),
            environment: EnvironmentSpec::frozen(vec![0.0]),
            initial: InitialSpec::gaussian(0.4, 0.2),
            sigma: 1.0,
            horizon: 0.25,
        };
        let theta = ThetaGrid::new(6.0, 32, Boundary::NoFlux);
        let space = SpaceEnvGrid::from_spec(&spec, 2, 4);
        let xi0 = initial_slice(&spec, &theta, &space).unwrap();
        solve_mckean_vlasov(&spec, &theta, &space, &xi0, 16).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let flow = small_flow();
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("flow");
        write_density(&flow, &base).unwrap();
        let back = read_density(&base).unwrap();
        assert_eq!(flow.values, back.values);
        assert_eq!(flow.times, back.times);
        assert_eq!(flow.clip_count, back.clip_count);
        assert_eq!(flow.space.total_fibers(), back.space.total_fibers());
    }

    #[test]
    fn header_mismatch_is_detected() {
        let flow = small_flow();
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("flow");
        write_density(&flow, &base).unwrap();
        // corrupt the cell count in the binary header
        let bin = base.with_extension("bin");
        let mut bytes = std::fs::read(&bin).unwrap();
        bytes[0] ^= 1;
        std::fs::write(&bin, &bytes).unwrap();
        assert!(matches!(read_density(&base), Err(PdeError::Corrupt(_))));
    }

    #[test]
    fn moment_curves_have_one_row_per_time() {
        let flow = small_flow();
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("moments.csv");
        write_moments_csv(&flow, &file).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + flow.num_times());
        assert_eq!(lines[0], "time,mean_theta,var_theta,mass_defect");
    }
}
