//! 2D drawing primitives shared by seaweed and fungus descriptors.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
    pub thickness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

/// Closed outline; the last point connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outline {
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeometryDescriptor {
    pub segments: Vec<Segment>,
    pub circles: Vec<Circle>,
    pub outlines: Vec<Outline>,
}

/// Unit direction for an angle in degrees measured clockwise from +y.
pub(crate) fn direction(angle_deg: f64) -> Point {
    let a = angle_deg.to_radians();
    [a.sin(), a.cos()]
}

pub(crate) fn offset(p: Point, dir: Point, len: f64) -> Point {
    [p[0] + dir[0] * len, p[1] + dir[1] * len]
}
