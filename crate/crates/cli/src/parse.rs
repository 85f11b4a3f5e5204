use nilperc::coupling::{FiniteGraph, QuotientSpec};
use nilperc::group::{builtin_spec, Builtin};
use nilperc::haar::{CoordinateSystem, Region};
use nilperc::percolation::WindowSpec;
use nilperc::{Group, LatticePoint};

use crate::config::{fail, CliError};

fn usage(m: String) -> CliError {
    CliError::Usage(m)
}

pub fn group(name: &str) -> Result<Group, CliError> {
    let b = Builtin::parse(name).map_err(fail)?;
    Group::new(builtin_spec(&b).map_err(fail)?).map_err(fail)
}

fn numbers<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| usage(format!("bad number '{x}' in '{s}'"))))
        .collect()
}

fn one<T: std::str::FromStr>(s: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| usage(format!("bad number '{s}'")))
}

pub fn window(s: &str, dim: usize) -> Result<WindowSpec, CliError> {
    WindowSpec::parse(s, dim).map_err(fail)
}

/// `unitcube-graded`, `halfbox:N`, `box:LO,..:HI,..` (closed, exponential
/// coordinates).
pub fn region(s: &str, dim: usize) -> Result<Region, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["unitcube-graded"] => Ok(Region::unit_cube_graded(dim)),
        ["halfbox", n] => Ok(Region::HalfScaledBox { n: one(n)? }),
        ["box", lo, hi] => Ok(Region::closed_box(numbers(lo)?, numbers(hi)?, CoordinateSystem::Exponential)),
        _ => Err(usage(format!("unknown region '{s}'"))),
    }
}

/// `ladder:LEN`, `grid-reflection:W,H`, `grid:W,H`.
pub fn quotient(s: &str) -> Result<QuotientSpec, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["ladder", len] => QuotientSpec::ladder(one(len)?).map_err(fail),
        ["grid-reflection", wh] | ["grid", wh] => {
            let v: Vec<usize> = numbers(wh)?;
            let [w, h] = v[..] else { return Err(usage(format!("'{s}' needs W,H"))) };
            if parts[0] == "grid" {
                QuotientSpec::trivial(FiniteGraph::grid(w, h), vec![false; w * h]).map_err(fail)
            } else {
                QuotientSpec::grid_reflection(w, h).map_err(fail)
            }
        }
        _ => Err(usage(format!("unknown quotient '{s}'"))),
    }
}

/// Points written as `a,b;c,d`.
pub fn points(s: &str, dim: usize) -> Result<Vec<LatticePoint>, CliError> {
    s.split(';')
        .map(|p| {
            let v: Vec<i64> = numbers(p)?;
            if v.len() != dim {
                return Err(usage(format!("point '{p}' needs {dim} coordinates")));
            }
            Ok(LatticePoint(v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_and_regions() {
        assert_eq!(window("torus:8", 2).unwrap(), WindowSpec::torus(8));
        assert_eq!(window("box:0,0:3,4", 2).unwrap(), WindowSpec::coord_box(vec![0, 0], vec![3, 4]));
        assert_eq!(window("disc:3", 2).unwrap_err().code(), 2);
        assert_eq!(region("halfbox:4", 3).unwrap(), Region::HalfScaledBox { n: 4.0 });
        assert!(region("cube", 3).is_err());
    }

    #[test]
    fn quotients_and_points() {
        assert_eq!(quotient("ladder:5").unwrap().n_orbits(), 5);
        assert_eq!(quotient("grid:3,4").unwrap().n_orbits(), 12);
        assert_eq!(quotient("grid-reflection:4,3").unwrap().n_orbits(), 6);
        assert!(quotient("grid-reflection:3,3").is_err());
        assert_eq!(points("2,0;0,1", 2).unwrap(), vec![LatticePoint(vec![2, 0]), LatticePoint(vec![0, 1])]);
        assert!(points("1,2,3", 2).is_err());
        assert_eq!(group("nope").unwrap_err().code(), 2);
    }
}
