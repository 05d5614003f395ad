//! NK fitness landscapes with block-structured interaction patterns.
//!
//! The N decisions are split into `m` contiguous equal blocks, one per
//! manager. Every decision depends on all other decisions of its own block
//! plus `k_ex` decisions from outside it, so `K = n/m - 1 + k_ex`.

use std::fmt;
use std::ops::Range;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Largest supported decision count. The global optimum is found by full
/// enumeration, so this is bounded by patience rather than by `u64`.
pub const MAX_N: usize = 24;

/// A binary decision vector of fixed length, bit `i` being decision `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    mask: u64,
    len: usize,
}

impl Configuration {
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_mask(0, len)
    }

    pub fn from_mask(mask: u64, len: usize) -> Result<Self> {
        if len > MAX_N {
            return Err(invalid(
                "n",
                format!("{len} exceeds the maximum of {MAX_N}"),
            ));
        }
        if mask >> len != 0 {
            return Err(invalid(
                "mask",
                format!("{mask:#x} has bits beyond length {len}"),
            ));
        }
        Ok(Self { mask, len })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut mask = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << i,
                other => return Err(Error::NotBinary(other)),
            }
        }
        Self::from_mask(mask, bits.len())
    }

    /// Uniformly random configuration.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        let mask = if len == 0 {
            0
        } else {
            rng.random::<u64>() & low_bits(len)
        };
        Self::from_mask(mask, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn bit(&self, i: usize) -> u8 {
        debug_assert!(i < self.len);
        ((self.mask >> i) & 1) as u8
    }

    pub fn flipped(&self, i: usize) -> Self {
        debug_assert!(i < self.len);
        Self {
            mask: self.mask ^ (1 << i),
            len: self.len,
        }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    pub fn hamming(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len, other.len);
        (self.mask ^ other.mask).count_ones() as usize
    }

    /// The sub-configuration covering `range`.
    pub fn slice(&self, range: Range<usize>) -> Self {
        debug_assert!(range.end <= self.len);
        let len = range.len();
        Self {
            mask: (self.mask >> range.start) & low_bits(len),
            len,
        }
    }

    /// A copy with `range` overwritten by `part`.
    pub fn with_slice(&self, range: Range<usize>, part: &Self) -> Self {
        debug_assert_eq!(range.len(), part.len);
        debug_assert!(range.end <= self.len);
        let hole = low_bits(part.len) << range.start;
        Self {
            mask: (self.mask & !hole) | (part.mask << range.start),
            len: self.len,
        }
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        Configuration::from_bits(&bits).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn low_bits(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// How cross-block dependencies are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// The `k_ex` decisions following the block, wrapping modulo n.
    #[default]
    Cyclic,
    /// `k_ex` decisions sampled per decision from outside its block.
    Random,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Cyclic => "cyclic",
            Pattern::Random => "random",
        })
    }
}

/// Which decisions affect each decision's contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionStructure {
    n: usize,
    m: usize,
    k_ex: usize,
    pattern: Pattern,
    dependencies: Vec<Vec<usize>>,
}

impl InteractionStructure {
    /// Builds the structure for `n` decisions split across `m` managers.
    ///
    /// Within-block coupling is full; `rng` is only consulted for
    /// [`Pattern::Random`].
    pub fn build<R: Rng + ?Sized>(
        n: usize,
        m: usize,
        k_ex: usize,
        pattern: Pattern,
        rng: &mut R,
    ) -> Result<Self> {
        check_partition(n, m)?;
        let size = n / m;
        if k_ex > n - size {
            return Err(invalid(
                "kEx",
                format!("{k_ex} exceeds the {} decisions outside a block", n - size),
            ));
        }

        let mut dependencies = Vec::with_capacity(n);
        for i in 0..n {
            let block = (i / size) * size..(i / size + 1) * size;
            let mut deps: Vec<usize> = block.clone().filter(|&j| j != i).collect();
            match pattern {
                Pattern::Cyclic => deps.extend((0..k_ex).map(|j| (block.end + j) % n)),
                Pattern::Random => {
                    let outside: Vec<usize> = (0..n).filter(|j| !block.contains(j)).collect();
                    deps.extend(
                        sample(rng, outside.len(), k_ex)
                            .into_iter()
                            .map(|idx| outside[idx]),
                    );
                }
            }
            dependencies.push(deps);
        }
        let structure = Self {
            n,
            m,
            k_ex,
            pattern,
            dependencies,
        };
        structure.validate()?;
        Ok(structure)
    }

    /// Assembles a structure from explicit dependency lists.
    pub fn from_dependencies(
        m: usize,
        k_ex: usize,
        pattern: Pattern,
        dependencies: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let structure = Self {
            n: dependencies.len(),
            m,
            k_ex,
            pattern,
            dependencies,
        };
        structure.validate()?;
        Ok(structure)
    }

    fn validate(&self) -> Result<()> {
        check_partition(self.n, self.m)?;
        let k = self.k();
        for (i, deps) in self.dependencies.iter().enumerate() {
            if deps.len() != k {
                return Err(Error::MalformedLandscape(format!(
                    "decision {i} has {} dependencies, expected {k}",
                    deps.len()
                )));
            }
            let block = self.block_of(i);
            let mut seen = 0u64;
            let mut external = 0;
            for &j in deps {
                if j >= self.n || j == i || seen & (1 << j) != 0 {
                    return Err(Error::MalformedLandscape(format!(
                        "decision {i} has invalid dependency {j}"
                    )));
                }
                seen |= 1 << j;
                if !block.contains(&j) {
                    external += 1;
                }
            }
            if external != self.k_ex {
                return Err(Error::MalformedLandscape(format!(
                    "decision {i} has {external} cross-block dependencies, expected {}",
                    self.k_ex
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of managers (blocks).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn block_size(&self) -> usize {
        self.n / self.m
    }

    pub fn k(&self) -> usize {
        self.k_intra() + self.k_ex
    }

    pub fn k_intra(&self) -> usize {
        self.block_size() - 1
    }

    pub fn k_ex(&self) -> usize {
        self.k_ex
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn dependencies(&self, i: usize) -> &[usize] {
        &self.dependencies[i]
    }

    /// Range of manager `r`'s block.
    pub fn block(&self, r: usize) -> Range<usize> {
        let size = self.block_size();
        r * size..(r + 1) * size
    }

    pub fn block_of(&self, i: usize) -> Range<usize> {
        self.block(i / self.block_size())
    }

    pub fn blocks(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.m).map(|r| self.block(r))
    }

    /// Index of the manager owning `block`, if it is one of the partitions.
    pub fn manager_of_block(&self, block: &Range<usize>) -> Option<usize> {
        let size = self.block_size();
        (block.len() == size && block.start.is_multiple_of(size) && block.end <= self.n)
            .then(|| block.start / size)
    }
}

fn check_partition(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(invalid("n", format!("must be in 1..={MAX_N}, got {n}")));
    }
    if m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    if !n.is_multiple_of(m) {
        return Err(Error::NotDivisible { n, m });
    }
    Ok(())
}

/// The best configuration of a landscape and its performance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub config: Configuration,
    pub value: f64,
}

/// An NK landscape: structure, contribution tables and cached optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    structure: InteractionStructure,
    tables: Vec<Vec<f64>>,
    optimum: Optimum,
}

impl Landscape {
    /// Draws every table entry uniformly from [0, 1) and solves the
    /// landscape exhaustively.
    pub fn generate<R: Rng + ?Sized>(structure: InteractionStructure, rng: &mut R) -> Self {
        let width = 1usize << (structure.k() + 1);
        let tables = (0..structure.n())
            .map(|_| (0..width).map(|_| rng.random::<f64>()).collect())
            .collect();
        Self::assemble(structure, tables)
    }

    /// Builds a landscape from explicit tables.
    pub fn from_tables(structure: InteractionStructure, tables: Vec<Vec<f64>>) -> Result<Self> {
        let width = 1usize << (structure.k() + 1);
        if tables.len() != structure.n() {
            return Err(Error::MalformedLandscape(format!(
                "{} tables for {} decisions",
                tables.len(),
                structure.n()
            )));
        }
        for (i, table) in tables.iter().enumerate() {
            if table.len() != width {
                return Err(Error::MalformedLandscape(format!(
                    "table {i} has {} entries, expected {width}",
                    table.len()
                )));
            }
            if let Some(v) = table.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::MalformedLandscape(format!(
                    "table {i} holds {v}, outside [0, 1]"
                )));
            }
        }
        Ok(Self::assemble(structure, tables))
    }

    fn assemble(structure: InteractionStructure, tables: Vec<Vec<f64>>) -> Self {
        let mut landscape = Self {
            structure,
            tables,
            optimum: Optimum {
                config: Configuration { mask: 0, len: 0 },
                value: f64::NEG_INFINITY,
            },
        };
        landscape.optimum = landscape.solve();
        landscape
    }

    fn solve(&self) -> Optimum {
        let n = self.n();
        let mut best = Optimum {
            config: Configuration { mask: 0, len: n },
            value: f64::NEG_INFINITY,
        };
        for mask in 0..(1u64 << n) {
            let value = self.evaluate_mask(mask);
            if value > best.value {
                best = Optimum {
                    config: Configuration { mask, len: n },
                    value,
                };
            }
        }
        best
    }

    pub fn structure(&self) -> &InteractionStructure {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.structure.n()
    }

    pub fn table(&self, i: usize) -> &[f64] {
        &self.tables[i]
    }

    pub fn global_optimum(&self) -> &Optimum {
        &self.optimum
    }

    /// Table key of decision `i`: its own bit followed by its dependencies'
    /// bits in stored order, most significant first.
    pub fn table_key(&self, mask: u64, i: usize) -> usize {
        self.structure.dependencies[i]
            .iter()
            .fold(((mask >> i) & 1) as usize, |key, &j| {
                (key << 1) | ((mask >> j) & 1) as usize
            })
    }

    pub(crate) fn contribution_mask(&self, mask: u64, i: usize) -> f64 {
        self.tables[i][self.table_key(mask, i)]
    }

    pub(crate) fn evaluate_mask(&self, mask: u64) -> f64 {
        let sum: f64 = (0..self.n()).map(|i| self.contribution_mask(mask, i)).sum();
        sum / self.n() as f64
    }

    pub(crate) fn block_performance_mask(&self, mask: u64, block: Range<usize>) -> f64 {
        let sum: f64 = block.map(|i| self.contribution_mask(mask, i)).sum();
        sum / self.n() as f64
    }

    fn check_len(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: config.len(),
            });
        }
        Ok(())
    }

    /// Contribution of decision `i` under `config`.
    pub fn contribution(&self, config: &Configuration, i: usize) -> Result<f64> {
        self.check_len(config)?;
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(self.contribution_mask(config.mask, i))
    }

    /// Overall performance: the mean of all contributions.
    pub fn evaluate(&self, config: &Configuration) -> Result<f64> {
        self.check_len(config)?;
        Ok(self.evaluate_mask(config.mask))
    }

    /// One manager's share of overall performance: the block's
    /// contributions divided by `n`. Shares over all blocks sum to
    /// [`Landscape::evaluate`].
    pub fn manager_performance(&self, config: &Configuration, block: Range<usize>) -> Result<f64> {
        self.check_len(config)?;
        if self.structure.manager_of_block(&block).is_none() {
            return Err(Error::MisalignedBlock {
                start: block.start,
                end: block.end,
            });
        }
        Ok(self.block_performance_mask(config.mask, block))
    }

    /// Serializable form carrying the generation parameters.
    pub fn to_file(&self, seed: Option<u64>) -> LandscapeFile {
        LandscapeFile {
            n: self.n(),
            m: self.structure.m,
            k_ex: self.structure.k_ex,
            pattern: self.structure.pattern,
            seed,
            dependencies: self.structure.dependencies.clone(),
            tables: self.tables.clone(),
            optimum: self.optimum,
        }
    }

    /// Rebuilds a landscape from its file form. The optimum is recomputed
    /// and must match the stored one exactly.
    pub fn from_file(file: LandscapeFile) -> Result<Self> {
        let structure = InteractionStructure::from_dependencies(
            file.m,
            file.k_ex,
            file.pattern,
            file.dependencies,
        )?;
        if structure.n() != file.n {
            return Err(Error::MalformedLandscape(format!(
                "n = {} but {} dependency lists",
                file.n,
                structure.n()
            )));
        }
        let landscape = Self::from_tables(structure, file.tables)?;
        if landscape.optimum.value.to_bits() != file.optimum.value.to_bits() {
            return Err(Error::MalformedLandscape(format!(
                "stored optimum {} differs from recomputed {}",
                file.optimum.value, landscape.optimum.value
            )));
        }
        Ok(landscape)
    }
}

/// JSON layout of a dumped landscape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LandscapeFile {
    pub n: usize,
    pub m: usize,
    pub k_ex: usize,
    pub pattern: Pattern,
    pub seed: Option<u64>,
    pub dependencies: Vec<Vec<usize>>,
    pub tables: Vec<Vec<f64>>,
    pub optimum: Optimum,
}
