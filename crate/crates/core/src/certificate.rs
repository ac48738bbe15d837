//! Pairwise verification of families and the certificate document format.
//!
//! A certificate lists a family of paths and, for every unordered pair
//! `(i, j)` with `i < j`, one witness (a cycle or a 4-clique) in the union of
//! the two paths. Witnesses are ordered by pair index.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::constructions::ConstructedFamily;
use crate::error::{Error, Result};
use crate::model::{union_of, Cycle, HamPath, Vertex};
use crate::relations::{find_witness, DifferencePredicate, Witness};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub witness: Witness,
}

#[derive(Clone, Debug)]
pub struct FamilyCertificate {
    pub n: usize,
    pub predicate: DifferencePredicate,
    pub construction: String,
    pub paths: Vec<HamPath>,
    pub witnesses: Vec<PairWitness>,
}

/// A pair that does not satisfy the claimed predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub reason: String,
    /// Cycle lengths of the pair's union, when both paths are valid.
    pub cycle_lengths: Vec<usize>,
}

impl From<PairFailure> for Error {
    fn from(f: PairFailure) -> Self {
        Error::Verification { i: f.i, j: f.j, reason: f.reason }
    }
}

fn check_pair(
    paths: &[HamPath],
    i: usize,
    j: usize,
    p: &DifferencePredicate,
) -> std::result::Result<Witness, PairFailure> {
    let (a, b) = (&paths[i], &paths[j]);
    if a == b {
        return Err(PairFailure { i, j, reason: format!("duplicate path {a}"), cycle_lengths: Vec::new() });
    }
    let union = union_of(a, b).map_err(|e| PairFailure { i, j, reason: e.to_string(), cycle_lengths: Vec::new() })?;
    let lengths = || union.cycle_lengths().into_iter().collect::<Vec<_>>();
    match find_witness(a, b, p) {
        Ok(Some(w)) => Ok(w),
        Ok(None) => Err(PairFailure { i, j, reason: format!("no {p} witness"), cycle_lengths: lengths() }),
        Err(e) => Err(PairFailure { i, j, reason: e.to_string(), cycle_lengths: lengths() }),
    }
}

/// Certify every pair of the family, failing on the first bad pair in
/// index order.
pub fn verify_family(f: &ConstructedFamily) -> Result<FamilyCertificate> {
    if f.paths.is_empty() {
        return Err(Error::InvalidParameter("cannot certify an empty family".into()));
    }
    let n = f.paths[0].n();
    let mut witnesses = Vec::new();
    for i in 0..f.paths.len() {
        for j in i + 1..f.paths.len() {
            let witness = check_pair(&f.paths, i, j, &f.claim)?;
            witnesses.push(PairWitness { i, j, witness });
        }
    }
    Ok(FamilyCertificate {
        n,
        predicate: f.claim.clone(),
        construction: f.provenance.name.to_string(),
        paths: f.paths.clone(),
        witnesses,
    })
}

/// Every failing pair, in index order.
pub fn verify_family_exhaustive(f: &ConstructedFamily) -> Vec<PairFailure> {
    let mut out = Vec::new();
    for i in 0..f.paths.len() {
        for j in i + 1..f.paths.len() {
            if let Err(e) = check_pair(&f.paths, i, j, &f.claim) {
                out.push(e);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub i: usize,
    pub j: usize,
    pub kind: String,
    pub vertices: Vec<Vertex>,
}

/// Serialized certificate. Field names are part of the file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub version: u32,
    pub n: usize,
    pub predicate: String,
    pub construction: String,
    pub size: usize,
    pub paths: Vec<String>,
    pub witnesses: Vec<WitnessRecord>,
}

impl FamilyCertificate {
    pub fn to_doc(&self) -> CertificateDoc {
        CertificateDoc {
            version: CERTIFICATE_VERSION,
            n: self.n,
            predicate: self.predicate.to_string(),
            construction: self.construction.clone(),
            size: self.paths.len(),
            paths: self.paths.iter().map(HamPath::to_string).collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessRecord {
                    i: w.i,
                    j: w.j,
                    kind: w.witness.kind().to_string(),
                    vertices: w.witness.vertices().to_vec(),
                })
                .collect(),
        }
    }
}

impl CertificateDoc {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn fail(i: usize, j: usize, reason: impl Into<String>) -> PairFailure {
    PairFailure { i, j, reason: reason.into(), cycle_lengths: Vec::new() }
}

fn decode_witness(rec: &WitnessRecord) -> std::result::Result<Witness, PairFailure> {
    match rec.kind.as_str() {
        "cycle" => Cycle::new(&rec.vertices).map(Witness::Cycle).map_err(|e| fail(rec.i, rec.j, e.to_string())),
        "clique4" => <[Vertex; 4]>::try_from(rec.vertices.as_slice())
            .map(Witness::Clique4)
            .map_err(|_| fail(rec.i, rec.j, "clique4 witness needs 4 vertices")),
        other => Err(fail(rec.i, rec.j, format!("unknown witness kind {other:?}"))),
    }
}

/// Structural problems with a certificate that are not tied to a pair.
#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    /// The document is malformed (bad header, unparsable fields).
    #[error("malformed certificate: {0}")]
    Malformed(Error),
    /// A specific pair fails.
    #[error("pair ({}, {}): {}", .0.i, .0.j, .0.reason)]
    Pair(PairFailure),
}

impl From<PairFailure> for CertificateError {
    fn from(f: PairFailure) -> Self {
        CertificateError::Pair(f)
    }
}

/// Re-validate a certificate from scratch: every path is a canonical
/// Hamiltonian path of `K_n`, paths are distinct, and every unordered pair
/// has exactly one witness that holds in the recomputed union.
pub fn check_certificate(doc: &CertificateDoc) -> std::result::Result<usize, CertificateError> {
    let malformed = |msg: String| CertificateError::Malformed(Error::InvalidParameter(msg));
    if doc.version != CERTIFICATE_VERSION {
        return Err(malformed(format!("unsupported certificate version {}", doc.version)));
    }
    let predicate: DifferencePredicate = doc.predicate.parse().map_err(CertificateError::Malformed)?;
    if doc.size != doc.paths.len() {
        return Err(malformed(format!("size {} but {} paths listed", doc.size, doc.paths.len())));
    }
    let mut paths = Vec::with_capacity(doc.paths.len());
    for (k, text) in doc.paths.iter().enumerate() {
        let h: HamPath = text.parse().map_err(CertificateError::Malformed)?;
        if h.n() != doc.n {
            return Err(malformed(format!("path {k} has order {} instead of {}", h.n(), doc.n)));
        }
        if h.to_string() != *text {
            return Err(malformed(format!("path {k} ({text}) is not in canonical form")));
        }
        paths.push(h);
    }
    let mut seen = BTreeSet::new();
    for (k, h) in paths.iter().enumerate() {
        if !seen.insert(h) {
            let first = paths.iter().position(|x| x == h).expect("seen before");
            return Err(fail(first, k, format!("duplicate path {h}")).into());
        }
    }
    let mut covered = BTreeSet::new();
    for rec in &doc.witnesses {
        if rec.i >= rec.j || rec.j >= paths.len() {
            return Err(fail(rec.i, rec.j, "witness pair index out of range").into());
        }
        if !covered.insert((rec.i, rec.j)) {
            return Err(fail(rec.i, rec.j, "pair witnessed twice").into());
        }
        let witness = decode_witness(rec)?;
        let union = union_of(&paths[rec.i], &paths[rec.j]).map_err(CertificateError::Malformed)?;
        if !witness.validates(union.graph(), &predicate) {
            return Err(PairFailure {
                i: rec.i,
                j: rec.j,
                reason: format!("{} witness {:?} does not hold", rec.kind, rec.vertices),
                cycle_lengths: union.cycle_lengths().into_iter().collect(),
            }
            .into());
        }
    }
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            if !covered.contains(&(i, j)) {
                return Err(fail(i, j, "pair has no witness").into());
            }
        }
    }
    Ok(covered.len())
}
