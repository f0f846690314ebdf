//! Fixed-resolution closed outlines for mark shapes and icon morphing.
//!
//! Every outline is resampled to [`SHAPE_POINTS`] points at equal arc length,
//! centered on its bounding box, scaled to fit `[-1, 1]²` and given a common
//! winding, so that two outlines can be blended point by point once they are
//! cyclically aligned.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const SHAPE_POINTS: usize = 64;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline64(Arc<[Point; SHAPE_POINTS]>);

impl Polyline64 {
    pub fn from_points(points: [Point; SHAPE_POINTS]) -> Self {
        Self(Arc::new(points))
    }

    pub fn points(&self) -> &[Point; SHAPE_POINTS] {
        &self.0
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Unit circle, starting at angle 0 and running screen-clockwise.
    pub fn circle() -> Self {
        let mut pts = [[0.0; 2]; SHAPE_POINTS];
        for (i, p) in pts.iter_mut().enumerate() {
            let a = TAU * i as f64 / SHAPE_POINTS as f64;
            *p = [a.cos(), a.sin()];
        }
        Self::from_points(pts)
    }

    /// Unit square outline.
    pub fn square() -> Self {
        resample_closed(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
            .expect("square is a valid outline")
    }

    /// Rotates the starting point by `offset` positions.
    pub fn rotated(&self, offset: usize) -> Self {
        let mut pts = [[0.0; 2]; SHAPE_POINTS];
        for (i, p) in pts.iter_mut().enumerate() {
            *p = self.0[(i + offset) % SHAPE_POINTS];
        }
        Self::from_points(pts)
    }
}

impl Serialize for Polyline64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyline64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<Point> = Vec::deserialize(d)?;
        let arr: [Point; SHAPE_POINTS] = v.try_into().map_err(|v: Vec<Point>| {
            serde::de::Error::custom(format!("expected {SHAPE_POINTS} points, got {}", v.len()))
        })?;
        Ok(Self::from_points(arr))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("outline needs at least 3 distinct vertices")]
    TooFewVertices,
    #[error("outline has zero length")]
    ZeroLength,
    #[error("path data: {0}")]
    PathSyntax(String),
}

fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

/// Resamples a closed polygon to 64 points at equal arc length starting at
/// its first vertex, then normalizes position, scale and winding.
pub fn resample_closed(vertices: &[Point]) -> Result<Polyline64, ShapeError> {
    let mut verts: Vec<Point> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if verts.last() != Some(v) {
            verts.push(*v);
        }
    }
    if verts.len() > 1 && verts.first() == verts.last() {
        verts.pop();
    }
    if verts.len() < 3 {
        return Err(ShapeError::TooFewVertices);
    }
    if signed_area(&verts) < 0.0 {
        verts[1..].reverse();
    }
    let n = verts.len();
    let seg_len: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let perimeter: f64 = seg_len.iter().sum();
    if perimeter <= 0.0 {
        return Err(ShapeError::ZeroLength);
    }

    let mut out = [[0.0; 2]; SHAPE_POINTS];
    let mut seg = 0;
    let mut seg_start = 0.0;
    for (k, p) in out.iter_mut().enumerate() {
        let target = perimeter * k as f64 / SHAPE_POINTS as f64;
        while seg + 1 < n && seg_start + seg_len[seg] <= target {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let (a, b) = (verts[seg], verts[(seg + 1) % n]);
        let t = if seg_len[seg] > 0.0 {
            ((target - seg_start) / seg_len[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        *p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &out {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let half = ((hi[0] - lo[0]).max(hi[1] - lo[1])) / 2.0;
    if half <= 0.0 {
        return Err(ShapeError::ZeroLength);
    }
    for p in &mut out {
        *p = [(p[0] - center[0]) / half, (p[1] - center[1]) / half];
    }
    Ok(Polyline64::from_points(out))
}

/// Summed squared distance between `a[i]` and `b[i + offset]`.
pub fn alignment_cost(a: &Polyline64, b: &Polyline64, offset: usize) -> f64 {
    let (pa, pb) = (a.points(), b.points());
    (0..SHAPE_POINTS)
        .map(|i| {
            let q = pb[(i + offset) % SHAPE_POINTS];
            (pa[i][0] - q[0]).powi(2) + (pa[i][1] - q[1]).powi(2)
        })
        .sum()
}

/// Rotates `b` to the cyclic offset that best matches `a`. Ties go to the
/// smallest offset.
pub fn align_to(a: &Polyline64, b: &Polyline64) -> Polyline64 {
    let mut best = (0usize, f64::INFINITY);
    for offset in 0..SHAPE_POINTS {
        let c = alignment_cost(a, b, offset);
        if c < best.1 {
            best = (offset, c);
        }
    }
    b.rotated(best.0)
}

/// Point-wise blend of two aligned outlines; `u = 0` and `u = 1` return the
/// inputs themselves.
pub fn morph_shape(a: &Polyline64, b: &Polyline64, u: f64) -> Polyline64 {
    if u <= 0.0 {
        return a.clone();
    }
    if u >= 1.0 {
        return b.clone();
    }
    let (pa, pb) = (a.points(), b.points());
    let mut out = [[0.0; 2]; SHAPE_POINTS];
    for (i, p) in out.iter_mut().enumerate() {
        *p = [
            pa[i][0] + u * (pb[i][0] - pa[i][0]),
            pa[i][1] + u * (pb[i][1] - pa[i][1]),
        ];
    }
    Polyline64::from_points(out)
}

/// Morph weight over one transition: rises over `[0.2, 0.4]`, holds until
/// 0.7, and falls back to the base shape by 0.9.
pub fn morph_envelope(u: f64) -> f64 {
    if u <= 0.2 || u >= 0.9 {
        0.0
    } else if u < 0.4 {
        (u - 0.2) / 0.2
    } else if u <= 0.7 {
        1.0
    } else {
        (0.9 - u) / 0.2
    }
}

/// Parses the absolute `M`/`L`/`H`/`V`/`Z` subset of SVG path data into a
/// single closed polygon. Bare coordinate pairs continue the last command.
pub fn parse_path(data: &str) -> Result<Vec<Point>, ShapeError> {
    let spaced: String = data
        .chars()
        .flat_map(|c| {
            if c.is_ascii_alphabetic() && c != 'e' && c != 'E' {
                vec![' ', c, ' ']
            } else if c == ',' {
                vec![' ']
            } else {
                vec![c]
            }
        })
        .collect();
    let mut tokens = spaced.split_whitespace().peekable();
    let mut pts: Vec<Point> = Vec::new();
    let mut cmd = 'M';
    let num = |tok: Option<&str>| -> Result<f64, ShapeError> {
        tok.ok_or_else(|| ShapeError::PathSyntax("unexpected end".into()))?
            .parse::<f64>()
            .map_err(|e| ShapeError::PathSyntax(e.to_string()))
    };
    while let Some(&tok) = tokens.peek() {
        if let Some(c) = tok.chars().next().filter(|c| c.is_ascii_alphabetic()) {
            tokens.next();
            match c {
                'M' | 'L' | 'H' | 'V' => cmd = c,
                'Z' | 'z' => break,
                other => {
                    return Err(ShapeError::PathSyntax(format!("unsupported command `{other}`")))
                }
            }
            continue;
        }
        let last = pts.last().copied().unwrap_or([0.0, 0.0]);
        match cmd {
            'M' | 'L' => {
                let x = num(tokens.next())?;
                let y = num(tokens.next())?;
                pts.push([x, y]);
            }
            'H' => pts.push([num(tokens.next())?, last[1]]),
            'V' => pts.push([last[0], num(tokens.next())?]),
            _ => unreachable!(),
        }
    }
    Ok(pts)
}

pub fn icon_from_path(data: &str) -> Result<Polyline64, ShapeError> {
    resample_closed(&parse_path(data)?)
}

pub const BUILTIN_ICONS: [(&str, &str); 4] = [
    ("down-arrow", include_str!("../../assets/icons/down-arrow.path")),
    ("up-arrow", include_str!("../../assets/icons/up-arrow.path")),
    ("cross", include_str!("../../assets/icons/cross.path")),
    ("heart", include_str!("../../assets/icons/heart.path")),
];

/// Named icon outlines, resampled at load time.
#[derive(Debug, Clone, Default)]
pub struct IconSet {
    icons: BTreeMap<String, Polyline64>,
}

impl IconSet {
    pub fn builtin() -> Self {
        let mut set = Self::default();
        for (name, data) in BUILTIN_ICONS {
            set.insert(name, icon_from_path(data).expect("builtin icons parse"));
        }
        set
    }

    pub fn insert(&mut self, name: &str, shape: Polyline64) {
        self.icons.insert(name.to_string(), shape);
    }

    pub fn get(&self, name: &str) -> Option<&Polyline64> {
        self.icons.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.icons.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.icons.keys().map(String::as_str)
    }
}
