use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cayley::enumerate_ball;
use crate::error::PercolationError;
use crate::group::{Group, LatticePoint};
use crate::rng::hash_coords;

pub const DEFAULT_VERTEX_CAP: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowKind {
    WordBall { radius: usize },
    CoordBox { lo: Vec<i64>, hi: Vec<i64> },
    /// `[0, side)^d`, abelian groups only.
    Torus { side: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Free,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub boundary: Boundary,
}

impl WindowSpec {
    pub fn torus(side: i64) -> Self {
        WindowSpec { kind: WindowKind::Torus { side }, boundary: Boundary::Periodic }
    }

    pub fn word_ball(radius: usize) -> Self {
        WindowSpec { kind: WindowKind::WordBall { radius }, boundary: Boundary::Free }
    }

    pub fn coord_box(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        WindowSpec { kind: WindowKind::CoordBox { lo, hi }, boundary: Boundary::Free }
    }

    /// Box `[0, side)^d` with free boundary.
    pub fn square(dim: usize, side: i64) -> Self {
        WindowSpec::coord_box(vec![0; dim], vec![side - 1; dim])
    }

    /// Parses `torus:SIDE`, `square:SIDE`, `ball:RADIUS` or
    /// `box:LO,..:HI,..` for a group of dimension `dim`.
    pub fn parse(s: &str, dim: usize) -> Result<Self, PercolationError> {
        let bad = || PercolationError::BadWindow(format!("cannot parse window '{s}'"));
        let ints = |t: &str| -> Result<Vec<i64>, PercolationError> {
            t.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["torus", side] => Ok(WindowSpec::torus(side.trim().parse().map_err(|_| bad())?)),
            ["square", side] => Ok(WindowSpec::square(dim, side.trim().parse().map_err(|_| bad())?)),
            ["ball", radius] => Ok(WindowSpec::word_ball(radius.trim().parse().map_err(|_| bad())?)),
            ["box", lo, hi] => {
                let (lo, hi) = (ints(lo)?, ints(hi)?);
                if lo.len() != dim || hi.len() != dim {
                    return Err(PercolationError::BadWindow(format!("box corners need {dim} coordinates")));
                }
                Ok(WindowSpec::coord_box(lo, hi))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
enum Layout {
    /// Abelian group on an axis-aligned box; neighbors by coordinate arithmetic.
    Grid { lo: Vec<i64>, ext: Vec<i64>, periodic: bool },
    Hashed { index: FxHashMap<LatticePoint, u32> },
}

/// A finite vertex set of the Cayley graph with fast neighbor lookup.
#[derive(Clone, Debug)]
pub struct Window {
    pub spec: Option<WindowSpec>,
    dim: usize,
    coords: Vec<i64>,
    hashes: Vec<u64>,
    layout: Layout,
    group: Group,
}

impl Window {
    pub fn build(group: &Group, spec: &WindowSpec, cap: usize) -> Result<Window, PercolationError> {
        let d = group.dim();
        let abelian = group.spec().is_abelian();
        if spec.boundary == Boundary::Periodic && !abelian {
            return Err(PercolationError::BadWindow("periodic boundary needs an abelian group".into()));
        }
        match &spec.kind {
            WindowKind::WordBall { radius } => {
                if spec.boundary == Boundary::Periodic {
                    return Err(PercolationError::BadWindow("word balls have free boundary".into()));
                }
                let t = enumerate_ball(group, *radius, true, cap)
                    .map_err(|e| match e {
                        crate::error::MetricError::ResourceCap { cap } => PercolationError::WindowTooLarge(cap),
                        other => other.into(),
                    })?;
                let mut pts: Vec<LatticePoint> = t.elements.expect("materialized").into_keys().collect();
                pts.sort();
                let mut w = Window::from_points(group, pts)?;
                w.spec = Some(spec.clone());
                Ok(w)
            }
            WindowKind::Torus { side } => {
                if !abelian {
                    return Err(PercolationError::BadWindow("torus windows need an abelian group".into()));
                }
                if spec.boundary != Boundary::Periodic {
                    return Err(PercolationError::BadWindow("torus windows are periodic".into()));
                }
                Window::grid(group, spec, vec![0; d], vec![*side - 1; d], true, cap)
            }
            WindowKind::CoordBox { lo, hi } => {
                if lo.len() != d || hi.len() != d || lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return Err(PercolationError::BadWindow("box corners must satisfy lo <= hi in every coordinate".into()));
                }
                let periodic = spec.boundary == Boundary::Periodic;
                if abelian {
                    Window::grid(group, spec, lo.clone(), hi.clone(), periodic, cap)
                } else {
                    let n = volume(lo, hi);
                    if n > cap as u128 {
                        return Err(PercolationError::WindowTooLarge(n.min(usize::MAX as u128) as usize));
                    }
                    let mut pts = Vec::with_capacity(n as usize);
                    let mut x = lo.clone();
                    loop {
                        pts.push(LatticePoint(x.clone()));
                        if !advance(&mut x, lo, hi) {
                            break;
                        }
                    }
                    let mut w = Window::from_points(group, pts)?;
                    w.spec = Some(spec.clone());
                    Ok(w)
                }
            }
        }
    }

    fn grid(
        group: &Group,
        spec: &WindowSpec,
        lo: Vec<i64>,
        hi: Vec<i64>,
        periodic: bool,
        cap: usize,
    ) -> Result<Window, PercolationError> {
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(PercolationError::BadWindow("empty window".into()));
        }
        let n = volume(&lo, &hi);
        if n > cap as u128 {
            return Err(PercolationError::WindowTooLarge(n.min(usize::MAX as u128) as usize));
        }
        let d = lo.len();
        let ext: Vec<i64> = lo.iter().zip(&hi).map(|(a, b)| b - a + 1).collect();
        let mut coords = Vec::with_capacity(n as usize * d);
        let mut x = lo.clone();
        loop {
            coords.extend_from_slice(&x);
            if !advance(&mut x, &lo, &hi) {
                break;
            }
        }
        let hashes = coords.chunks(d).map(hash_coords).collect();
        Ok(Window {
            spec: Some(spec.clone()),
            dim: d,
            coords,
            hashes,
            layout: Layout::Grid { lo, ext, periodic },
            group: group.clone(),
        })
    }

    /// Window on an explicit vertex list; order is preserved.
    pub fn from_points(group: &Group, pts: Vec<LatticePoint>) -> Result<Window, PercolationError> {
        let d = group.dim();
        let mut index = FxHashMap::default();
        let mut coords = Vec::with_capacity(pts.len() * d);
        for (i, p) in pts.iter().enumerate() {
            if p.dim() != d {
                return Err(PercolationError::BadWindow(format!("vertex {:?} has wrong dimension", p.0)));
            }
            if index.insert(p.clone(), i as u32).is_some() {
                return Err(PercolationError::BadWindow(format!("duplicate vertex {:?}", p.0)));
            }
            coords.extend_from_slice(&p.0);
        }
        let hashes = coords.chunks(d.max(1)).map(hash_coords).collect();
        Ok(Window { spec: None, dim: d, coords, hashes, layout: Layout::Hashed { index }, group: group.clone() })
    }

    pub fn len(&self) -> usize {
        self.hashes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self, i: usize) -> &[i64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertex(&self, i: usize) -> LatticePoint {
        LatticePoint(self.coords(i).to_vec())
    }

    pub fn vertex_hash(&self, i: usize) -> u64 {
        self.hashes[i]
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.layout, Layout::Grid { periodic: true, .. })
    }

    /// Smallest side length of a periodic window.
    pub fn min_period(&self) -> Option<i64> {
        match &self.layout {
            Layout::Grid { ext, periodic: true, .. } => ext.iter().copied().min(),
            _ => None,
        }
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        match &self.layout {
            Layout::Hashed { index } => index.get(p).map(|&i| i as usize),
            Layout::Grid { lo, ext, periodic } => grid_index(&p.0, lo, ext, *periodic),
        }
    }

    /// Index of `u * s`, if it lies in the window.
    pub fn neighbor(&self, u: usize, s: &LatticePoint) -> Option<usize> {
        match &self.layout {
            Layout::Grid { lo, ext, periodic } => {
                let x = self.coords(u);
                let mut idx = 0i64;
                for k in 0..self.dim {
                    let mut c = x[k] + s.0[k] - lo[k];
                    if *periodic {
                        c = c.rem_euclid(ext[k]);
                    } else if c < 0 || c >= ext[k] {
                        return None;
                    }
                    idx = idx * ext[k] + c;
                }
                Some(idx as usize)
            }
            Layout::Hashed { index } => {
                let v = self.group.multiply(&self.vertex(u), s).ok()?;
                index.get(&v).map(|&i| i as usize)
            }
        }
    }
}

fn grid_index(x: &[i64], lo: &[i64], ext: &[i64], periodic: bool) -> Option<usize> {
    let mut idx = 0i64;
    for k in 0..x.len() {
        let mut c = x[k] - lo[k];
        if periodic {
            c = c.rem_euclid(ext[k]);
        } else if c < 0 || c >= ext[k] {
            return None;
        }
        idx = idx * ext[k] + c;
    }
    Some(idx as usize)
}

fn volume(lo: &[i64], hi: &[i64]) -> u128 {
    lo.iter().zip(hi).map(|(a, b)| (b - a + 1).max(0) as u128).product()
}

/// Lexicographic odometer over `[lo, hi]`, last coordinate fastest.
fn advance(x: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for k in (0..x.len()).rev() {
        if x[k] < hi[k] {
            x[k] += 1;
            return true;
        }
        x[k] = lo[k];
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{builtin_spec, Builtin};

    fn group(b: Builtin) -> Group {
        Group::new(builtin_spec(&b).unwrap()).unwrap()
    }

    #[test]
    fn parses_window_names() {
        assert_eq!(WindowSpec::parse("torus:8", 2).unwrap(), WindowSpec::torus(8));
        assert_eq!(WindowSpec::parse("square:3", 2).unwrap(), WindowSpec::coord_box(vec![0, 0], vec![2, 2]));
        assert_eq!(WindowSpec::parse("ball:4", 3).unwrap(), WindowSpec::word_ball(4));
        assert_eq!(WindowSpec::parse("box:0,-1:3,4", 2).unwrap(), WindowSpec::coord_box(vec![0, -1], vec![3, 4]));
        for bad in ["box:0:3", "disc:3", "torus:x", "torus"] {
            assert!(WindowSpec::parse(bad, 2).is_err(), "{bad}");
        }
    }

    #[test]
    fn torus_wraps() {
        let g = group(Builtin::Zd(2));
        let w = Window::build(&g, &WindowSpec::torus(4), 100).unwrap();
        assert_eq!(w.len(), 16);
        let u = w.index_of(&LatticePoint(vec![3, 0])).unwrap();
        let v = w.neighbor(u, &LatticePoint(vec![1, 0])).unwrap();
        assert_eq!(w.vertex(v), LatticePoint(vec![0, 0]));
    }

    #[test]
    fn free_box_clips() {
        let g = group(Builtin::Zd(2));
        let w = Window::build(&g, &WindowSpec::square(2, 3), 100).unwrap();
        let u = w.index_of(&LatticePoint(vec![2, 1])).unwrap();
        assert_eq!(w.neighbor(u, &LatticePoint(vec![1, 0])), None);
        assert_eq!(w.neighbor(u, &LatticePoint(vec![-1, 1])), w.index_of(&LatticePoint(vec![1, 2])));
    }

    #[test]
    fn nonabelian_restrictions() {
        let g = group(Builtin::Heisenberg3);
        assert!(matches!(Window::build(&g, &WindowSpec::torus(4), 100), Err(PercolationError::BadWindow(_))));
        let w = Window::build(&g, &WindowSpec::word_ball(2), 1000).unwrap();
        assert_eq!(w.len() as u64, enumerate_ball(&g, 2, false, 1000).unwrap().counts[2]);
        let u = w.index_of(&LatticePoint(vec![1, 0, 0])).unwrap();
        assert_eq!(w.neighbor(u, &LatticePoint(vec![0, 1, 0])), w.index_of(&LatticePoint(vec![1, 1, 1])));
    }

    #[test]
    fn caps_and_malformed_boxes() {
        let g = group(Builtin::Zd(2));
        assert!(matches!(Window::build(&g, &WindowSpec::torus(100), 50), Err(PercolationError::WindowTooLarge(_))));
        let bad = WindowSpec::coord_box(vec![0, 3], vec![2, 1]);
        assert!(matches!(Window::build(&g, &bad, 50), Err(PercolationError::BadWindow(_))));
    }
}
