use crate::error::CoreError;
use crate::evalset::EvalSet3;
use crate::field::{field_sum_2d, field_sum_3d};
use crate::icosphere::SurfaceMesh3D;
use crate::material::Material;
use crate::norms::circle_nodes;
use crate::polygon::BoundaryMesh2D;
use crate::richardson::richardson_q;
use crate::{Vec2, Vec3};
use rayon::prelude::*;

/// One resolution of a convergence table: the L² norms, the Richardson rate
/// once two finer resolutions exist, and (for circle sweeps) the spread of
/// the normal displacement component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Segment count (2D) or icosphere refinement level (3D).
    pub resolution: u64,
    pub norm_plain: f64,
    pub norm_rms: f64,
    pub q: Option<f64>,
    pub std_dev: Option<f64>,
}

/// Convergence table of one evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseTable {
    pub label: String,
    /// Set when the evaluation geometry crosses the cell surface, where the
    /// second-order theory does not apply.
    pub theory_violating: bool,
    /// Smallest station clearance any sample saw, over all resolutions.
    pub min_clearance: f64,
    pub rows: Vec<ConvergenceRow>,
}

fn attach_rates(rows: &mut [ConvergenceRow], norms: &[f64]) -> Result<(), CoreError> {
    for i in 0..rows.len() {
        rows[i].q = if i + 2 < norms.len() {
            Some(richardson_q(norms[i], norms[i + 1], norms[i + 2])?)
        } else {
            None
        };
    }
    Ok(())
}

/// Circle-cell convergence sweep: L² norm of the displacement over a
/// concentric evaluation circle for each boundary resolution.
///
/// Two extra resolution doublings are appended beyond the requested list so
/// every requested row gets a Richardson rate.
#[derive(Debug, Clone)]
pub struct Study2d {
    pub material: Material,
    pub magnitude: f64,
    pub cell_center: Vec2,
    pub cell_radius: f64,
    /// Center of the evaluation circle (the cell center in the reference
    /// setup).
    pub eval_center: Vec2,
    pub eval_radius: f64,
    /// Boundary segment counts, strictly increasing.
    pub resolutions: Vec<usize>,
    /// Evaluation-circle sample count; `None` applies
    /// [`Study2d::circle_samples`] per resolution.
    pub norm_samples: Option<usize>,
}

impl Study2d {
    /// The reference configuration: soft-tissue material, cell of radius 0.3
    /// at the origin, concentric evaluation circle at R = 0.5.
    pub fn reference() -> Self {
        Self {
            material: Material::new(1.0e7, 0.25).expect("reference material"),
            magnitude: 1.0e3,
            cell_center: Vec2::zeros(),
            cell_radius: 0.3,
            eval_center: Vec2::zeros(),
            eval_radius: 0.5,
            resolutions: vec![10, 20, 40, 80],
            norm_samples: None,
        }
    }

    /// Sample count used for the evaluation-circle norm at boundary
    /// resolution `m`: large enough that the evaluation quadrature error
    /// stays far below the boundary discretization error being measured.
    pub fn circle_samples(m: usize) -> usize {
        1024.max(8 * m)
    }

    fn validate(&self) -> Result<(), CoreError> {
        if self.resolutions.is_empty() {
            return Err(CoreError::ParamDomain("resolutions list is empty".into()));
        }
        if self.resolutions[0] < 3 {
            return Err(CoreError::ParamDomain(
                "2D resolutions must be at least 3".into(),
            ));
        }
        if !self.resolutions.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::ParamDomain(
                "resolutions must be strictly increasing".into(),
            ));
        }
        if !(self.eval_radius.is_finite() && self.eval_radius > 0.0) {
            return Err(CoreError::ParamDomain(
                "evaluation radius must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<CaseTable, CoreError> {
        self.validate()?;
        let mut resolutions = self.resolutions.clone();
        let last = *resolutions.last().expect("validated nonempty");
        resolutions.push(2 * last);
        resolutions.push(4 * last);

        let measure = 2.0 * std::f64::consts::PI * self.eval_radius;
        let mut rows = Vec::with_capacity(resolutions.len());
        let mut norms = Vec::with_capacity(resolutions.len());
        let mut min_clearance = f64::INFINITY;
        for &m in &resolutions {
            let mesh =
                BoundaryMesh2D::circle(self.cell_center, self.cell_radius, m, self.magnitude)?;
            let sample_count = self.norm_samples.unwrap_or_else(|| Self::circle_samples(m));
            if sample_count < 8 {
                return Err(CoreError::ParamDomain(format!(
                    "circle norm needs at least 8 samples, got {sample_count}"
                )));
            }
            let nodes = circle_nodes(&self.eval_center, self.eval_radius, sample_count);
            let samples: Vec<_> = nodes
                .par_iter()
                .map(|(p, _)| field_sum_2d(&mesh, &self.material, p))
                .collect();

            let mut sum = 0.0;
            let mut components = Vec::with_capacity(nodes.len());
            for ((p, w), s) in nodes.iter().zip(samples) {
                let s = s?;
                sum += s.displacement.norm_squared() * w;
                let radial = (p - self.eval_center).normalize();
                components.push(s.displacement.dot(&radial));
                min_clearance = min_clearance.min(s.min_station_distance);
            }
            let plain = sum.sqrt();
            let mean = components.iter().sum::<f64>() / components.len() as f64;
            let var = components
                .iter()
                .map(|c| (c - mean) * (c - mean))
                .sum::<f64>()
                / components.len() as f64;

            norms.push(plain);
            rows.push(ConvergenceRow {
                resolution: m as u64,
                norm_plain: plain,
                norm_rms: plain / measure.sqrt(),
                q: None,
                std_dev: Some(var.sqrt()),
            });
        }
        attach_rates(&mut rows, &norms)?;

        let eval_set = crate::EvalSet2::Circle {
            center: self.eval_center,
            radius: self.eval_radius,
            samples: 8,
        };
        Ok(CaseTable {
            label: "circle".into(),
            theory_violating: eval_set.straddles_surface(&self.cell_center, self.cell_radius),
            min_clearance,
            rows,
        })
    }
}

/// A labelled evaluation set of the 3D study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyCase {
    pub label: String,
    pub set: EvalSet3,
}

/// Sphere-cell convergence sweep: per refinement level, the L² norm of the
/// displacement over each evaluation set.
#[derive(Debug, Clone)]
pub struct Study3d {
    pub material: Material,
    pub magnitude: f64,
    pub cell_center: Vec3,
    pub cell_radius: f64,
    /// Icosphere refinement levels, strictly increasing. Rates appear on
    /// every row with two finer rows in the list.
    pub levels: Vec<u32>,
    pub cases: Vec<StudyCase>,
}

impl Study3d {
    /// The reference 3D experiment: sphere of radius 0.1 at the origin,
    /// refinement levels 2..=7, and the five standard evaluation sets: a
    /// far point, two clear segments, a segment through the cell, and a unit
    /// plane patch touching the cell center.
    ///
    /// Table row `m = 1..6` corresponds to subdivision level `m + 1`; the
    /// sweep starts at level 2 (320 triangles) because the icosahedron and
    /// its first subdivision are too coarse to sit in the asymptotic regime
    /// of a far evaluation point.
    pub fn reference() -> Self {
        let cell_center = Vec3::zeros();
        Self {
            material: Material::new(1.0e7, 0.25).expect("reference material"),
            magnitude: 1.0e3,
            cell_center,
            cell_radius: 0.1,
            levels: (2..=7).collect(),
            cases: Self::reference_cases(),
        }
    }

    /// The five standard evaluation sets of [`Study3d::reference`].
    pub fn reference_cases() -> Vec<StudyCase> {
        vec![
            StudyCase {
                label: "case1_point".into(),
                set: EvalSet3::Point(Vec3::new(2.0, 0.0, 0.0)),
            },
            StudyCase {
                label: "case2a_segment".into(),
                set: EvalSet3::Segment {
                    a: Vec3::new(-1.0, 1.0, -1.0),
                    b: Vec3::new(-1.0, 1.0, 1.0),
                    subdivisions: 10,
                },
            },
            StudyCase {
                label: "case2a_intersecting".into(),
                set: EvalSet3::Segment {
                    a: Vec3::new(0.0, 0.0, -1.0),
                    b: Vec3::new(0.0, 0.0, 1.0),
                    subdivisions: 10,
                },
            },
            StudyCase {
                label: "case2b_segment".into(),
                set: EvalSet3::Segment {
                    a: Vec3::new(10.0, 0.0, -1.0),
                    b: Vec3::new(10.0, 0.0, 1.0),
                    subdivisions: 10,
                },
            },
            StudyCase {
                label: "case3_plane".into(),
                set: EvalSet3::Rectangle {
                    corner: Vec3::new(-1.0, -1.0, 0.0),
                    edge1: Vec3::new(1.0, 0.0, 0.0),
                    edge2: Vec3::new(0.0, 1.0, 0.0),
                    cells1: 12,
                    cells2: 12,
                },
            },
        ]
    }

    fn validate(&self) -> Result<(), CoreError> {
        if self.levels.is_empty() {
            return Err(CoreError::ParamDomain("levels list is empty".into()));
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::ParamDomain(
                "levels must be strictly increasing".into(),
            ));
        }
        if self.cases.is_empty() {
            return Err(CoreError::ParamDomain("no evaluation sets".into()));
        }
        for case in &self.cases {
            case.set.validate()?;
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Vec<CaseTable>, CoreError> {
        self.validate()?;
        let mut tables: Vec<CaseTable> = self
            .cases
            .iter()
            .map(|case| CaseTable {
                label: case.label.clone(),
                theory_violating: case
                    .set
                    .straddles_surface(&self.cell_center, self.cell_radius),
                min_clearance: f64::INFINITY,
                rows: Vec::with_capacity(self.levels.len()),
            })
            .collect();

        for &level in &self.levels {
            let mesh = SurfaceMesh3D::icosphere(
                self.cell_center,
                self.cell_radius,
                level,
                self.magnitude,
            )?;
            for (case, table) in self.cases.iter().zip(&mut tables) {
                let (norm, clearance) = case
                    .set
                    .norm_with_clearance(|p| field_sum_3d(&mesh, &self.material, p))?;
                table.min_clearance = table.min_clearance.min(clearance);
                table.rows.push(ConvergenceRow {
                    resolution: level as u64,
                    norm_plain: norm.plain,
                    norm_rms: norm.rms,
                    q: None,
                    std_dev: None,
                });
            }
        }

        for table in &mut tables {
            let norms: Vec<f64> = table.rows.iter().map(|r| r.norm_plain).collect();
            attach_rates(&mut table.rows, &norms)?;
        }
        Ok(tables)
    }
}
