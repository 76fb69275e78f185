//! Geometry export: CSV for trajectories and fiber samples, ASCII PLY point
//! clouds for three-dimensional sources.

use crate::flow::{FiberSample, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("unsupported format: PLY point clouds need a 3-dimensional source, got {0}")]
    PlyDimension(usize),
}

/// CSV with header `t,x1..xm,rho,gnorm2,psi_1..psi_p`.
pub fn trajectory_csv(traj: &Trajectory, m: usize, p: usize) -> String {
    let mut out = String::from("t,");
    for i in 1..=m {
        out.push_str(&format!("x{},", i));
    }
    out.push_str("rho,gnorm2,");
    for j in 1..=p {
        out.push_str(&format!("psi_{}", j));
        if j < p {
            out.push(',');
        }
    }
    out.push('\n');
    for s in &traj.samples {
        out.push_str(&format!("{},", s.t));
        for x in &s.x {
            out.push_str(&format!("{},", x));
        }
        out.push_str(&format!("{},{},", s.rho, s.gnorm2));
        for (j, v) in s.psi.iter().enumerate() {
            out.push_str(&format!("{}", v));
            if j + 1 < s.psi.len() {
                out.push(',');
            }
        }
        out.push('\n');
    }
    out
}

/// CSV with header `x1,...,xm,residual`.
pub fn fiber_csv(fs: &FiberSample, m: usize) -> String {
    let mut out = String::new();
    for i in 1..=m {
        out.push_str(&format!("x{},", i));
    }
    out.push_str("residual\n");
    for pt in &fs.points {
        for c in &pt.coords {
            out.push_str(&format!("{},", c));
        }
        out.push_str(&format!("{}\n", pt.residual));
    }
    out
}

/// ASCII PLY point cloud; source dimension must be 3.
pub fn ply_point_cloud<'a, I>(points: I, m: usize) -> Result<String, ExportError>
where
    I: IntoIterator<Item = &'a Vec<f64>>,
{
    if m != 3 {
        return Err(ExportError::PlyDimension(m));
    }
    let pts: Vec<&Vec<f64>> = points.into_iter().collect();
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", pts.len()));
    out.push_str("property float x\nproperty float y\nproperty float z\n");
    out.push_str("end_header\n");
    for p in pts {
        out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    Ok(out)
}
