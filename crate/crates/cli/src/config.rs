use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kelvin_core::{EvalSet3, Material, StudyCase, Vec2, Vec3};
use serde::{Deserialize, Serialize};

/// On-disk study configuration. Every field is optional; omitted fields take
/// the reference-experiment defaults, so an empty file (or no file at all)
/// reproduces the standard studies.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub force: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormVariant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellSection>,
    /// Segment counts (2D) or icosphere refinement levels (3D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<u64>>,
    /// Mesh resolution used by `field` and `trace`; defaults to the last
    /// entry of `resolutions`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_resolution: Option<u64>,
    #[serde(default)]
    pub eval_sets: Vec<EvalSetSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub young_modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormVariant {
    Plain,
    Rms,
}

impl std::fmt::Display for NormVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormVariant::Plain => "plain",
            NormVariant::Rms => "rms",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EvalSetSection {
    Point {
        at: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Circle {
        center: Vec<f64>,
        radius: f64,
        /// 0 means automatic: max(1024, 8 * resolution).
        #[serde(default)]
        samples: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
        #[serde(default = "default_subdivisions")]
        subdivisions: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Rectangle {
        corner: Vec<f64>,
        edge1: Vec<f64>,
        edge2: Vec<f64>,
        #[serde(default = "default_cells")]
        cells: [usize; 2],
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

fn default_subdivisions() -> usize {
    10
}

fn default_cells() -> [usize; 2] {
    [12, 12]
}

/// Lattice for the `field` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub corner: Vec<f64>,
    pub edge1: Vec<f64>,
    pub edge2: Vec<f64>,
    pub cells: [usize; 2],
}

/// Outer-boundary sampling for the `trace` command: uniformly spaced points
/// on the circle (2D) or the vertices of an icosphere (3D) of the given
/// radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Number of outer-boundary points; 0 gives a header-only file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<u64>,
}

/// Fully resolved configuration: what a run actually used. Serialized into
/// every report so the run can be repeated bit-exactly.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub dimension: u8,
    pub young_modulus: f64,
    pub poisson_ratio: f64,
    pub force: f64,
    pub cell_center: Vec<f64>,
    pub cell_radius: f64,
    pub resolutions: Vec<u64>,
    pub field_resolution: u64,
    pub norm: NormVariant,
    pub output_dir: PathBuf,
    pub eval_sets: Vec<EvalSetSection>,
    pub grid: GridSection,
    pub trace_radius: f64,
    pub trace_points: u64,
}

impl ResolvedConfig {
    /// Re-expresses the resolved values in the loader's own schema, so the
    /// echoed file can be fed back through `--config` verbatim.
    pub fn to_file(&self) -> ConfigFile {
        let mut eval_sets = self.eval_sets.clone();
        for (index, set) in eval_sets.iter_mut().enumerate() {
            let label = set.label_or(index);
            match set {
                EvalSetSection::Point { label: l, .. }
                | EvalSetSection::Circle { label: l, .. }
                | EvalSetSection::Segment { label: l, .. }
                | EvalSetSection::Rectangle { label: l, .. } => *l = Some(label),
            }
        }
        ConfigFile {
            dimension: Some(self.dimension),
            force: Some(self.force),
            norm: Some(self.norm),
            output_dir: Some(self.output_dir.clone()),
            material: Some(MaterialSection {
                young_modulus: Some(self.young_modulus),
                poisson_ratio: Some(self.poisson_ratio),
            }),
            cell: Some(CellSection {
                center: Some(self.cell_center.clone()),
                radius: Some(self.cell_radius),
            }),
            resolutions: Some(self.resolutions.clone()),
            field_resolution: Some(self.field_resolution),
            eval_sets,
            grid: Some(self.grid.clone()),
            trace: Some(TraceSection {
                radius: Some(self.trace_radius),
                points: Some(self.trace_points),
            }),
        }
    }

    pub fn material(&self) -> Result<Material> {
        Material::new(self.young_modulus, self.poisson_ratio)
            .map_err(|e| anyhow::anyhow!("invalid material: {e}"))
    }

    pub fn cell_center_2d(&self) -> Vec2 {
        Vec2::new(self.cell_center[0], self.cell_center[1])
    }

    pub fn cell_center_3d(&self) -> Vec3 {
        Vec3::new(
            self.cell_center[0],
            self.cell_center[1],
            self.cell_center[2],
        )
    }
}

fn vec3_from(values: &[f64], what: &str) -> Result<Vec3> {
    if values.len() != 3 {
        bail!("{what} must have 3 components, got {}", values.len());
    }
    Ok(Vec3::new(values[0], values[1], values[2]))
}

impl EvalSetSection {
    pub fn label_or(&self, index: usize) -> String {
        let explicit = match self {
            Self::Point { label, .. }
            | Self::Circle { label, .. }
            | Self::Segment { label, .. }
            | Self::Rectangle { label, .. } => label.clone(),
        };
        explicit.unwrap_or_else(|| {
            let kind = match self {
                Self::Point { .. } => "point",
                Self::Circle { .. } => "circle",
                Self::Segment { .. } => "segment",
                Self::Rectangle { .. } => "rectangle",
            };
            format!("{kind}_{index}")
        })
    }

    pub fn to_eval_set_3d(&self) -> Result<EvalSet3> {
        match self {
            Self::Point { at, .. } => Ok(EvalSet3::Point(vec3_from(at, "eval point")?)),
            Self::Segment {
                a, b, subdivisions, ..
            } => Ok(EvalSet3::Segment {
                a: vec3_from(a, "segment endpoint a")?,
                b: vec3_from(b, "segment endpoint b")?,
                subdivisions: *subdivisions,
            }),
            Self::Rectangle {
                corner,
                edge1,
                edge2,
                cells,
                ..
            } => Ok(EvalSet3::Rectangle {
                corner: vec3_from(corner, "rectangle corner")?,
                edge1: vec3_from(edge1, "rectangle edge1")?,
                edge2: vec3_from(edge2, "rectangle edge2")?,
                cells1: cells[0],
                cells2: cells[1],
            }),
            Self::Circle { .. } => bail!("circle evaluation sets are 2D only"),
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub norm: Option<NormVariant>,
    pub resolutions: Option<Vec<u64>>,
}

pub fn load(path: Option<&Path>, dimension: u8, overrides: &Overrides) -> Result<ResolvedConfig> {
    let file: ConfigFile = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => ConfigFile::default(),
    };
    resolve(file, dimension, overrides)
}

pub fn resolve(
    file: ConfigFile,
    default_dimension: u8,
    overrides: &Overrides,
) -> Result<ResolvedConfig> {
    let dimension = file.dimension.unwrap_or(default_dimension);
    if dimension != 2 && dimension != 3 {
        bail!("dimension must be 2 or 3, got {dimension}");
    }

    let material = file.material.unwrap_or(MaterialSection {
        young_modulus: None,
        poisson_ratio: None,
    });
    let young_modulus = material.young_modulus.unwrap_or(1.0e7);
    let poisson_ratio = material.poisson_ratio.unwrap_or(0.25);

    let cell = file.cell.unwrap_or(CellSection {
        center: None,
        radius: None,
    });
    let cell_center = cell.center.unwrap_or_else(|| vec![0.0; dimension as usize]);
    if cell_center.len() != dimension as usize {
        bail!(
            "cell center has {} components for a {dimension}D study",
            cell_center.len()
        );
    }
    let cell_radius = cell
        .radius
        .unwrap_or(if dimension == 2 { 0.3 } else { 0.1 });

    let resolutions = overrides
        .resolutions
        .clone()
        .or(file.resolutions)
        .unwrap_or_else(|| {
            if dimension == 2 {
                vec![10, 20, 40, 80]
            } else {
                vec![2, 3, 4, 5, 6, 7]
            }
        });
    if resolutions.is_empty() {
        bail!("resolutions list is empty");
    }
    if !resolutions.windows(2).all(|w| w[0] < w[1]) {
        bail!("resolutions must be strictly increasing: {resolutions:?}");
    }
    if dimension == 2 && resolutions[0] < 3 {
        bail!("2D resolutions must be at least 3");
    }
    let field_resolution = file
        .field_resolution
        .unwrap_or_else(|| *resolutions.last().expect("nonempty"));

    let eval_sets = if file.eval_sets.is_empty() {
        default_eval_sets(dimension)
    } else {
        file.eval_sets
    };

    let grid = file.grid.unwrap_or_else(|| default_grid(dimension));
    let expected = dimension as usize;
    for (name, coords) in [
        ("grid corner", &grid.corner),
        ("grid edge1", &grid.edge1),
        ("grid edge2", &grid.edge2),
    ] {
        if coords.len() != expected {
            bail!("{name} must have {expected} components");
        }
    }

    let trace = file.trace.unwrap_or(TraceSection {
        radius: None,
        points: None,
    });

    Ok(ResolvedConfig {
        dimension,
        young_modulus,
        poisson_ratio,
        force: file.force.unwrap_or(1.0e3),
        cell_center,
        cell_radius,
        resolutions,
        field_resolution,
        norm: overrides.norm.or(file.norm).unwrap_or(NormVariant::Plain),
        output_dir: overrides
            .output_dir
            .clone()
            .or(file.output_dir)
            .unwrap_or_else(|| PathBuf::from("out")),
        eval_sets,
        grid,
        trace_radius: trace.radius.unwrap_or(0.5),
        trace_points: trace.points.unwrap_or(64),
    })
}

fn default_eval_sets(dimension: u8) -> Vec<EvalSetSection> {
    if dimension == 2 {
        vec![EvalSetSection::Circle {
            center: vec![0.0, 0.0],
            radius: 0.5,
            samples: 0,
            label: Some("circle".into()),
        }]
    } else {
        kelvin_core::Study3d::reference_cases()
            .into_iter()
            .map(|case| eval_set_section_from_case(&case))
            .collect()
    }
}

fn eval_set_section_from_case(case: &StudyCase) -> EvalSetSection {
    match &case.set {
        EvalSet3::Point(p) => EvalSetSection::Point {
            at: vec![p.x, p.y, p.z],
            label: Some(case.label.clone()),
        },
        EvalSet3::Segment { a, b, subdivisions } => EvalSetSection::Segment {
            a: vec![a.x, a.y, a.z],
            b: vec![b.x, b.y, b.z],
            subdivisions: *subdivisions,
            label: Some(case.label.clone()),
        },
        EvalSet3::Rectangle {
            corner,
            edge1,
            edge2,
            cells1,
            cells2,
        } => EvalSetSection::Rectangle {
            corner: vec![corner.x, corner.y, corner.z],
            edge1: vec![edge1.x, edge1.y, edge1.z],
            edge2: vec![edge2.x, edge2.y, edge2.z],
            cells: [*cells1, *cells2],
            label: Some(case.label.clone()),
        },
    }
}

fn default_grid(dimension: u8) -> GridSection {
    if dimension == 2 {
        GridSection {
            corner: vec![-2.0, -2.0],
            edge1: vec![4.0, 0.0],
            edge2: vec![0.0, 4.0],
            cells: [10, 10],
        }
    } else {
        GridSection {
            corner: vec![-2.0, -2.0, 0.0],
            edge1: vec![4.0, 0.0, 0.0],
            edge2: vec![0.0, 4.0, 0.0],
            cells: [10, 10],
        }
    }
}
