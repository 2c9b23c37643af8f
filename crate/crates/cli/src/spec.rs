//! Job, lattice and region documents (TOML).
//!
//! ```toml
//! seed = 7
//!
//! [lattice]
//! dimension = 3
//! extents = [10, 10, 8]
//! z = ["rough", "smooth"]      # low face, high face; omitted axes are periodic
//!
//! [regions.ball]
//! boxes = [[[2, 2, 0], [5, 5, 3]]]   # cell corners, low inclusive, high exclusive
//!
//! [[tasks]]
//! kind = "entropy"
//! regions = ["ball"]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toric_tee::region::{compose, partition_2d, partition_line, partition_point};
use toric_tee::{
    box_region, Boundary, Box3, CodeLattice, Face, LatticeSpec, LogicalChoice, Partition2dParams,
    PartitionABCD, PartitionParams, Region,
};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    /// Schema the document was written against; must match when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeInput>,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionInput>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeInput {
    pub dimension: usize,
    pub extents: Vec<usize>,
    #[serde(default)]
    pub x: AxisBoundary,
    #[serde(default)]
    pub y: AxisBoundary,
    #[serde(default)]
    pub z: AxisBoundary,
    #[serde(default)]
    pub logicals: Logicals,
}

/// Either one label for both faces of an axis or `[low, high]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisBoundary {
    Both(Boundary),
    Faces([Boundary; 2]),
}

impl Default for AxisBoundary {
    fn default() -> Self {
        AxisBoundary::Both(Boundary::Periodic)
    }
}

impl AxisBoundary {
    fn pair(self) -> [Boundary; 2] {
        match self {
            AxisBoundary::Both(b) => [b, b],
            AxisBoundary::Faces(f) => f,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Logicals {
    #[default]
    ZLowest,
    ZHighest,
    XType,
}

impl From<Logicals> for LogicalChoice {
    fn from(l: Logicals) -> Self {
        match l {
            Logicals::ZLowest => LogicalChoice::ZLowest,
            Logicals::ZHighest => LogicalChoice::ZHighest,
            Logicals::XType => LogicalChoice::XType,
        }
    }
}

impl LatticeInput {
    pub fn to_spec(&self) -> CliResult<LatticeSpec> {
        let d = self.dimension;
        if self.extents.len() != d {
            return Err(CliError::validation(
                "lattice.extents",
                format!("expected {d} entries, got {}", self.extents.len()),
            ));
        }
        if d == 2 && self.z != AxisBoundary::default() {
            return Err(CliError::validation("lattice.z", "a 2D lattice has no z faces"));
        }
        let mut extents = [1; 3];
        extents[..d].copy_from_slice(&self.extents);
        let faces = [self.x.pair(), self.y.pair(), self.z.pair()];
        LatticeSpec::new(d, extents, faces).map_err(|e| CliError::validation("lattice", e))
    }

    /// Parses `torus2:L`, `torus3:L` or `slab:AxBxC:bottom:top`.
    pub fn from_shorthand(s: &str) -> CliResult<Self> {
        let bad = || CliError::Parse {
            origin: format!("--lattice {s:?}"),
            message: "expected torus2:L, torus3:L, slab:AxBxC:bottom:top or a TOML file".into(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let boundary = |t: &str| match t {
            "smooth" => Ok(Boundary::Smooth),
            "rough" => Ok(Boundary::Rough),
            _ => Err(bad()),
        };
        let mut out = LatticeInput {
            dimension: 3,
            extents: vec![],
            x: AxisBoundary::default(),
            y: AxisBoundary::default(),
            z: AxisBoundary::default(),
            logicals: Logicals::default(),
        };
        match parts.as_slice() {
            ["torus2", l] => {
                out.dimension = 2;
                out.extents = vec![num(l)?; 2];
            }
            ["torus3", l] => out.extents = vec![num(l)?; 3],
            ["slab", dims, bottom, top] => {
                out.extents = dims.split('x').map(num).collect::<CliResult<_>>()?;
                if out.extents.len() != 3 {
                    return Err(bad());
                }
                out.z = AxisBoundary::Faces([boundary(bottom)?, boundary(top)?]);
            }
            _ => return Err(bad()),
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionInput {
    /// Union of boxes, each `[lo, hi]` in cell coordinates.
    #[serde(default)]
    pub boxes: Vec<[Vec<i64>; 2]>,
    /// Boxes removed from the union.
    #[serde(default)]
    pub minus: Vec<[Vec<i64>; 2]>,
    /// Extra qubit indices.
    #[serde(default)]
    pub qubits: Vec<usize>,
    /// One part of a partition template.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<TemplateInput>,
    /// Take the complement of everything above.
    #[serde(default)]
    pub complement: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartName {
    A,
    B,
    C,
    D,
    Bc,
    Cd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Point,
    Line,
    #[serde(rename = "2d")]
    TwoD,
}

/// A partition template with optional size overrides (cells).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateInput {
    pub template: Template,
    /// Which piece to take when the template defines a region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<PartName>,
    /// Face the partition stands on; point and line templates only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<[i64; 2]>,
}

/// A resolved template.
#[derive(Clone, Copy, Debug)]
pub enum Resolved {
    Point(Face, PartitionParams),
    Line(Face, PartitionParams),
    TwoD(Partition2dParams),
}

impl TemplateInput {
    pub fn resolve(&self, at: &str) -> CliResult<Resolved> {
        let face = || -> CliResult<Face> {
            let f = self.face.as_deref().unwrap_or("z_low");
            Face::parse(f).map_err(|e| CliError::validation(at, e))
        };
        match self.template {
            Template::Point | Template::Line => {
                let d = PartitionParams::default();
                let p = PartitionParams {
                    wall: self.wall.unwrap_or(d.wall),
                    core: self.core.unwrap_or(d.core),
                    depth: self.depth.unwrap_or(d.depth),
                    height: self.height.unwrap_or(d.height),
                    offset: self.offset.unwrap_or(d.offset),
                };
                Ok(if self.template == Template::Point {
                    Resolved::Point(face()?, p)
                } else {
                    Resolved::Line(face()?, p)
                })
            }
            Template::TwoD => {
                if self.face.is_some() || self.height.is_some() {
                    return Err(CliError::validation(at, "the 2d template takes no face or height"));
                }
                let d = Partition2dParams::default();
                Ok(Resolved::TwoD(Partition2dParams {
                    wall: self.wall.unwrap_or(d.wall),
                    core: self.core.unwrap_or(d.core),
                    depth: self.depth.unwrap_or(d.depth),
                    offset: self.offset.unwrap_or(d.offset),
                }))
            }
        }
    }

    pub fn build(&self, lattice: &CodeLattice, at: &str) -> CliResult<PartitionABCD> {
        let part = match self.resolve(at)? {
            Resolved::Point(f, p) => partition_point(lattice, f, &p),
            Resolved::Line(f, p) => partition_line(lattice, f, &p),
            Resolved::TwoD(p) => partition_2d(lattice, &p),
        };
        part.map_err(|e| CliError::validation(at, e))
    }
}

fn to_box(corners: &[Vec<i64>; 2], dim: usize, at: &str) -> CliResult<Box3> {
    let mut c = [[0i64; 3], [1i64; 3]];
    for (k, v) in corners.iter().enumerate() {
        if v.len() != dim {
            return Err(CliError::validation(
                at,
                format!("box corner {v:?} needs {dim} coordinates"),
            ));
        }
        c[k][..dim].copy_from_slice(v);
    }
    Ok(Box3::cells(c[0], c[1]))
}

impl RegionInput {
    pub fn build(&self, lattice: &CodeLattice, name: &str) -> CliResult<Region> {
        let at = format!("region {name:?}");
        let dim = lattice.spec().dimension();
        let boxes = |list: &[[Vec<i64>; 2]]| -> CliResult<Vec<Box3>> {
            list.iter().map(|b| to_box(b, dim, &at)).collect()
        };
        let mut r = compose(lattice, &boxes(&self.boxes)?, &[]);
        let extra = Region::from_qubits(lattice.n_qubits(), self.qubits.iter().copied())
            .map_err(|e| CliError::validation(&at, e))?;
        r = r.union(&extra);
        if let Some(p) = &self.partition {
            let Some(which) = p.part else {
                return Err(CliError::validation(&at, "partition needs a part (a, b, c, d, bc or cd)"));
            };
            let part = p.build(lattice, &at)?;
            let piece = match which {
                PartName::A => part.a.clone(),
                PartName::B => part.b.clone(),
                PartName::C => part.c.clone(),
                PartName::D => part.d.clone(),
                PartName::Bc => part.bc(),
                PartName::Cd => part.cd(),
            };
            r = r.union(&piece);
        }
        for b in boxes(&self.minus)? {
            r = r.difference(&box_region(lattice, &b));
        }
        if self.complement {
            r = r.complement();
        }
        Ok(r.with_label(name))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Run both engines and require agreement.
    #[default]
    Both,
    RestrictedRank,
    FattalPairs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Probe {
    Point,
    Line,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    Entropy {
        regions: Vec<String>,
        #[serde(default)]
        method: MethodChoice,
    },
    Invariant(TemplateInput),
    GraphReduce {
        region: String,
        /// The y-plane whose xz plaquettes stay in the generating set.
        plane_y: i64,
        /// Extra reductions in random move order.
        #[serde(default)]
        random_orders: usize,
    },
    ExcitationCheck {
        #[serde(default = "default_face")]
        face: String,
        probe: Probe,
    },
    VerifySuite {
        #[serde(default = "default_cases")]
        cases: usize,
    },
    ReproducePaper {},
}

fn default_face() -> String {
    "z_low".into()
}

fn default_cases() -> usize {
    100
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Entropy { .. } => "entropy",
            TaskSpec::Invariant(_) => "invariant",
            TaskSpec::GraphReduce { .. } => "graph-reduce",
            TaskSpec::ExcitationCheck { .. } => "excitation-check",
            TaskSpec::VerifySuite { .. } => "verify-suite",
            TaskSpec::ReproducePaper {} => "reproduce-paper",
        }
    }

    fn needs_lattice(&self) -> bool {
        !matches!(self, TaskSpec::ReproducePaper {})
    }
}

fn parse_toml<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_job(text: &str, origin: &str) -> CliResult<JobSpec> {
    let job: JobSpec = parse_toml(text, origin)?;
    if let Some(v) = job.schema_version {
        if v != crate::report::SCHEMA_VERSION {
            return Err(CliError::validation(
                "schema_version",
                format!("this tool reads version {}, got {v}", crate::report::SCHEMA_VERSION),
            ));
        }
    }
    Ok(job)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDoc {
    lattice: LatticeInput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionsDoc {
    #[serde(default)]
    regions: BTreeMap<String, RegionInput>,
}

/// `--lattice`: a shorthand, or a TOML file with a `[lattice]` table.
pub fn lattice_arg(arg: &str) -> CliResult<LatticeInput> {
    let path = Path::new(arg);
    if path.exists() {
        let doc: LatticeDoc = parse_toml(&read_file(path)?, arg)?;
        Ok(doc.lattice)
    } else {
        LatticeInput::from_shorthand(arg)
    }
}

/// `--regions`: a TOML file of `[regions.<name>]` tables.
pub fn regions_file(path: &Path) -> CliResult<BTreeMap<String, RegionInput>> {
    let doc: RegionsDoc = parse_toml(&read_file(path)?, &path.display().to_string())?;
    Ok(doc.regions)
}

impl JobSpec {
    /// Checks cross references without building anything.
    pub fn validate(&self) -> CliResult<()> {
        if self.tasks.is_empty() {
            return Err(CliError::validation("tasks", "the job has no tasks"));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            let at = format!("task {i} ({})", t.kind());
            if t.needs_lattice() && self.lattice.is_none() {
                return Err(CliError::validation(&at, "needs a [lattice] table"));
            }
            let names: Vec<&String> = match t {
                TaskSpec::Entropy { regions, .. } => {
                    if regions.is_empty() {
                        return Err(CliError::validation(&at, "lists no regions"));
                    }
                    regions.iter().collect()
                }
                TaskSpec::GraphReduce { region, .. } => vec![region],
                _ => vec![],
            };
            for name in names {
                if !self.regions.contains_key(name) {
                    return Err(CliError::validation(&at, format!("unknown region {name:?}")));
                }
            }
            match t {
                TaskSpec::Invariant(template) => {
                    if template.part.is_some() {
                        return Err(CliError::validation(&at, "part only applies to region definitions"));
                    }
                    template.resolve(&at)?;
                }
                TaskSpec::ExcitationCheck { face, .. } => {
                    Face::parse(face).map_err(|e| CliError::validation(&at, e))?;
                }
                _ => {}
            }
        }
        Ok(())
    }
}
