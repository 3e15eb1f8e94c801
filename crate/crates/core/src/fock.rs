//! Fock-state codes: a classical code split into `K` equal blocks, each block
//! giving one basis state `|c_i> = sum_{n in I_i} a_n |n>`.

use std::collections::HashMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::classical::{ClassicalCode, Ensemble};
use crate::error::{Error, Result};
use crate::rng;
use crate::simplex::{log2_big, simplex_size, SimplexPoint, SimplexShape};

pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "seed")]
pub enum PartitionPolicy {
    Sequential,
    Shuffled(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    t: usize,
    block_of: Vec<Option<usize>>,
    blocks: Vec<Vec<usize>>,
    discarded: Vec<usize>,
}

impl Partition {
    /// Splits `len` indices into `k` blocks of `floor(len/k)`; the trailing
    /// `len mod k` indices of the scan order are discarded.
    pub fn new(len: usize, k: usize, policy: PartitionPolicy) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("K must be at least 1"));
        }
        if k > len {
            return Err(Error::domain(format!("K = {k} exceeds the code length {len}")));
        }
        let mut order: Vec<usize> = (0..len).collect();
        if let PartitionPolicy::Shuffled(seed) = policy {
            order.shuffle(&mut rng::stream(seed, rng::SHUFFLE_STREAM));
        }
        let t = len / k;
        let mut block_of = vec![None; len];
        let mut blocks = vec![Vec::with_capacity(t); k];
        for (pos, &idx) in order.iter().take(k * t).enumerate() {
            block_of[idx] = Some(pos / t);
            blocks[pos / t].push(idx);
        }
        let discarded = order[k * t..].to_vec();
        Ok(Partition { k, t, block_of, blocks, discarded })
    }

    /// Rebuilds a partition from its block map (`None` marks a discarded index).
    pub fn from_block_of(block_of: Vec<Option<usize>>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("K must be at least 1"));
        }
        let mut blocks = vec![Vec::new(); k];
        let mut discarded = Vec::new();
        for (idx, b) in block_of.iter().enumerate() {
            match *b {
                Some(b) if b < k => blocks[b].push(idx),
                Some(b) => return Err(Error::domain(format!("block index {b} out of range for K = {k}"))),
                None => discarded.push(idx),
            }
        }
        let t = blocks[0].len();
        if t == 0 || blocks.iter().any(|b| b.len() != t) {
            return Err(Error::domain("blocks must be nonempty and of equal size"));
        }
        Ok(Partition { k, t, block_of, blocks, discarded })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Common block size.
    pub fn block_size(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_of(&self, idx: usize) -> Option<usize> {
        self.block_of[idx]
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn discarded(&self) -> &[usize] {
        &self.discarded
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockCode {
    pub classical: ClassicalCode,
    pub partition: Partition,
    amplitudes: Vec<f64>,
    overridden: bool,
    pub t_target: Option<u32>,
}

fn uniform_amplitudes(partition: &Partition) -> Vec<f64> {
    let a = 1.0 / (partition.block_size() as f64).sqrt();
    (0..partition.len())
        .map(|i| if partition.block_of(i).is_some() { a } else { 0.0 })
        .collect()
}

fn check_consistent(code: &ClassicalCode, partition: &Partition) -> Result<()> {
    if partition.len() != code.len() {
        return Err(Error::ShapeMismatch(format!(
            "partition covers {} indices, code has {} words",
            partition.len(),
            code.len()
        )));
    }
    Ok(())
}

/// First pair of retained indices holding the same point, if any.
pub fn find_duplicate(code: &ClassicalCode, partition: &Partition) -> Option<(usize, usize)> {
    let mut seen: HashMap<&[u32], usize> = HashMap::new();
    let mut retained: Vec<usize> = partition.blocks().iter().flatten().copied().collect();
    retained.sort_unstable();
    for idx in retained {
        if let Some(&first) = seen.get(code.words[idx].coords()) {
            return Some((first, idx));
        }
        seen.insert(code.words[idx].coords(), idx);
    }
    None
}

/// Uniform amplitudes `1/sqrt(T)` on every block.
///
/// Retained words must be pairwise distinct, within a block and across
/// blocks.
pub fn build_fock_code(
    code: ClassicalCode,
    partition: Partition,
    t_target: Option<u32>,
) -> Result<FockCode> {
    check_consistent(&code, &partition)?;
    if partition.block_size() == 0 {
        return Err(Error::domain("empty block"));
    }
    if let Some((first, second)) = find_duplicate(&code, &partition) {
        return Err(Error::DuplicateWord { first, second });
    }
    Ok(FockCode {
        amplitudes: uniform_amplitudes(&partition),
        classical: code,
        partition,
        overridden: false,
        t_target,
    })
}

/// Same assembly without the distinctness check. Only the deformation
/// diagnostics accept such a code; certification and the oracle reject it.
pub fn assemble_unchecked(
    code: ClassicalCode,
    partition: Partition,
    t_target: Option<u32>,
) -> Result<FockCode> {
    check_consistent(&code, &partition)?;
    Ok(FockCode {
        amplitudes: uniform_amplitudes(&partition),
        classical: code,
        partition,
        overridden: false,
        t_target,
    })
}

impl FockCode {
    pub fn k(&self) -> usize {
        self.partition.k()
    }

    pub fn shape(&self) -> SimplexShape {
        self.classical.shape
    }

    pub fn amplitude(&self, idx: usize) -> f64 {
        self.amplitudes[idx]
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitudes_overridden(&self) -> bool {
        self.overridden
    }

    /// `(word, amplitude)` pairs of block `b`.
    pub fn block_words(&self, b: usize) -> impl Iterator<Item = (&SimplexPoint, f64)> + '_ {
        self.partition
            .block(b)
            .iter()
            .map(move |&i| (&self.classical.words[i], self.amplitudes[i]))
    }

    /// Replaces the amplitudes. Each block must have unit norm; discarded
    /// indices must carry zero.
    pub fn with_amplitudes(mut self, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != self.classical.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for {} words",
                amplitudes.len(),
                self.classical.len()
            )));
        }
        if let Some(i) = amplitudes.iter().position(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::domain(format!("amplitude {i} must be a nonnegative real")));
        }
        if let Some(&i) = self.partition.discarded().iter().find(|&&i| amplitudes[i] != 0.0) {
            return Err(Error::domain(format!("discarded word {i} must have amplitude 0")));
        }
        for (b, members) in self.partition.blocks().iter().enumerate() {
            let norm: f64 = members.iter().map(|&i| amplitudes[i] * amplitudes[i]).sum();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::domain(format!("block {b} has squared norm {norm}, expected 1")));
            }
        }
        self.amplitudes = amplitudes;
        self.overridden = true;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let c = &self.classical;
        let file = FockFile {
            q: c.shape.q,
            n: c.shape.n,
            alpha: c.alpha,
            ensemble: c.ensemble,
            seed: c.seed,
            claimed_distance: c.claimed_distance,
            words: c.words.iter().map(|w| w.coords().to_vec()).collect(),
            k: self.k(),
            t: self.partition.block_size(),
            block_of: (0..self.partition.len())
                .map(|i| self.partition.block_of(i).map_or(-1, |b| b as i64))
                .collect(),
            discarded: self.partition.discarded().to_vec(),
            t_target: self.t_target,
            amplitudes: self.overridden.then(|| self.amplitudes.clone()),
        };
        let mut s = serde_json::to_string(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: FockFile = serde_json::from_str(s)?;
        let code = ClassicalCode {
            shape: SimplexShape::new(f.q, f.n)?,
            alpha: f.alpha,
            words: f.words.into_iter().map(SimplexPoint::from_counts).collect(),
            ensemble: f.ensemble,
            seed: f.seed,
            claimed_distance: f.claimed_distance,
        };
        code.validate()?;
        let block_of = f
            .block_of
            .iter()
            .map(|&b| if b < 0 { None } else { Some(b as usize) })
            .collect();
        let partition = Partition::from_block_of(block_of, f.k)?;
        if partition.block_size() != f.t {
            return Err(Error::domain(format!("T = {} does not match the block map", f.t)));
        }
        let mut fc = build_fock_code(code, partition, f.t_target)?;
        if let Some(a) = f.amplitudes {
            fc = fc.with_amplitudes(a)?;
        }
        Ok(fc)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json(&s)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FockFile {
    q: usize,
    #[serde(rename = "N")]
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    alpha: Option<f64>,
    ensemble: Ensemble,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    claimed_distance: Option<u32>,
    words: Vec<Vec<u32>>,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "T")]
    t: usize,
    block_of: Vec<i64>,
    discarded: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    t_target: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    amplitudes: Option<Vec<f64>>,
}

/// `log2 K / log2 |S_{q,N}|`.
pub fn quantum_rate(k: usize, shape: SimplexShape) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("K must be at least 1"));
    }
    let dim = log2_big(&simplex_size(shape));
    if dim == 0.0 {
        return Err(Error::domain(format!("{shape} has dimension 1, rate undefined")));
    }
    Ok((k as f64).log2() / dim)
}

/// Guaranteed overlap of any code state with the span of words whose
/// occupancies are all at most `b`: the minimum over blocks of the squared
/// amplitude mass on such words.
pub fn local_excitation_overlap(fc: &FockCode, b: u32) -> f64 {
    (0..fc.k())
        .map(|blk| {
            let (inside, outside): (Vec<_>, Vec<_>) = fc
                .block_words(blk)
                .filter(|(_, a)| *a > 0.0)
                .partition(|(w, _)| w.inf_norm() <= b);
            if outside.is_empty() {
                1.0
            } else if inside.is_empty() {
                0.0
            } else {
                inside.iter().map(|(_, a)| a * a).sum::<f64>().min(1.0)
            }
        })
        .fold(1.0, f64::min)
}

/// Permutation-invariant description: each Fock word `|n>` is the Dicke
/// state of length `N` over a `q`-letter alphabet with composition `n`. The
/// normalisation `binom(N; n)^{-1/2}` is implied by the composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiDescriptor {
    pub kind: String,
    pub length: u32,
    pub alphabet: usize,
    pub basis: Vec<PiBasisState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiBasisState {
    pub block: usize,
    pub compositions: Vec<Vec<u32>>,
    pub amplitudes: Vec<f64>,
}

pub fn export_pi(fc: &FockCode) -> PiDescriptor {
    PiDescriptor {
        kind: "permutation_invariant".to_string(),
        length: fc.shape().n,
        alphabet: fc.shape().q,
        basis: (0..fc.k())
            .map(|b| {
                let (compositions, amplitudes) =
                    fc.block_words(b).map(|(w, a)| (w.coords().to_vec(), a)).unzip();
                PiBasisState { block: b, compositions, amplitudes }
            })
            .collect(),
    }
}

impl PiDescriptor {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: PiDescriptor = serde_json::from_str(s)?;
        if d.kind != "permutation_invariant" {
            return Err(Error::domain(format!("unexpected descriptor kind {:?}", d.kind)));
        }
        for st in &d.basis {
            if st.compositions.len() != st.amplitudes.len() {
                return Err(Error::ShapeMismatch("compositions and amplitudes differ in length".into()));
            }
            for c in &st.compositions {
                if c.len() != d.alphabet || c.iter().map(|&x| x as u64).sum::<u64>() != d.length as u64 {
                    return Err(Error::ShapeMismatch(format!(
                        "composition {c:?} is not a composition of {} into {} parts",
                        d.length, d.alphabet
                    )));
                }
            }
        }
        Ok(d)
    }
}
