use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::tensor::Tensor;
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"XCRFCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

/// One named parameter with its adaptive-moment accumulators.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamEntry {
    name: String,
    value: Tensor,
    trainable: bool,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
}

impl ParamEntry {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> &Tensor {
        &self.value
    }

    pub fn trainable(&self) -> bool {
        self.trainable
    }

    pub fn moments(&self) -> (&[f64], &[f64]) {
        (&self.first_moment, &self.second_moment)
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Tensor, &mut Vec<f64>, &mut Vec<f64>) {
        (&mut self.value, &mut self.first_moment, &mut self.second_moment)
    }
}

/// Named parameter tensors plus optimizer state.
///
/// Entries keep insertion order for graph lookups; serialization walks them
/// in name order so equal stores always produce equal bytes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    entries: Vec<ParamEntry>,
    index: BTreeMap<String, usize>,
    step: u64,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, value: Tensor, trainable: bool) -> Result<()> {
        if self.index.contains_key(name) {
            return Err(Error::DuplicateParam(String::from(name)));
        }
        let n = value.len();
        self.index.insert(String::from(name), self.entries.len());
        self.entries.push(ParamEntry {
            name: String::from(name),
            value,
            trainable,
            first_moment: vec![0.0; n],
            second_moment: vec![0.0; n],
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn entry(&self, idx: usize) -> &ParamEntry {
        &self.entries[idx]
    }

    pub fn entries(&self) -> &[ParamEntry] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [ParamEntry] {
        &mut self.entries
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.index_of(name).map(|i| &self.entries[i].value)
    }

    /// Mutable access to a parameter value. Shape changes are not allowed.
    pub fn value_mut(&mut self, name: &str) -> Result<&mut [f64]> {
        let i = self.index_of(name).ok_or_else(|| Error::UnknownParam(String::from(name)))?;
        Ok(self.entries[i].value.data_mut())
    }

    pub fn set_trainable(&mut self, name: &str, trainable: bool) -> Result<()> {
        let i = self.index_of(name).ok_or_else(|| Error::UnknownParam(String::from(name)))?;
        self.entries[i].trainable = trainable;
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn set_step(&mut self, step: u64) {
        self.step = step;
    }

    pub fn trainable_scalars(&self) -> usize {
        self.entries.iter().filter(|e| e.trainable).map(|e| e.value.len()).sum()
    }

    /// Copies values and moments for every entry of `other` whose name
    /// starts with one of `prefixes` (all entries when empty), and takes its
    /// step count. Every copied name must exist here with the same shape;
    /// otherwise the error lists each offending tensor.
    pub fn load_from(&mut self, other: &ParamStore, prefixes: &[&str]) -> Result<usize> {
        let selected = |name: &str| prefixes.is_empty() || prefixes.iter().any(|p| name.starts_with(p));
        let mut problems = Vec::new();
        for src in other.entries.iter().filter(|e| selected(&e.name)) {
            match self.index_of(&src.name) {
                None => problems.push(format!("{} (not in model)", src.name)),
                Some(i) if self.entries[i].value.shape() != src.value.shape() => problems.push(format!(
                    "{} (checkpoint {:?}, model {:?})",
                    src.name,
                    src.value.shape(),
                    self.entries[i].value.shape()
                )),
                Some(_) => {}
            }
        }
        for dst in self.entries.iter().filter(|e| selected(&e.name)) {
            if !other.contains(&dst.name) {
                problems.push(format!("{} (missing from checkpoint)", dst.name));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Checkpoint(format!("incompatible tensors: {}", problems.join(", "))));
        }
        let mut copied = 0;
        for src in other.entries.iter().filter(|e| selected(&e.name)) {
            let i = self.index[&src.name];
            let dst = &mut self.entries[i];
            dst.value = src.value.clone();
            dst.first_moment = src.first_moment.clone();
            dst.second_moment = src.second_moment.clone();
            copied += 1;
        }
        self.step = other.step;
        Ok(copied)
    }

    /// Serializes to the checkpoint layout (all integers and floats
    /// little-endian):
    ///
    /// ```text
    /// magic      8 bytes  "XCRFCKPT"
    /// version    u32      1
    /// step       u64      optimizer step count
    /// count      u32      number of entries
    /// entries, in ascending name order:
    ///   name_len u32, name (UTF-8)
    ///   trainable u8 (0 or 1)
    ///   ndim u32, dims u64 x ndim
    ///   value, first moment, second moment: f64 x numel each
    /// ```
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.step.to_le_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for &i in self.index.values() {
            let e = &self.entries[i];
            out.extend_from_slice(&(e.name.len() as u32).to_le_bytes());
            out.extend_from_slice(e.name.as_bytes());
            out.push(e.trainable as u8);
            let shape = e.value.shape();
            out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
            for d in shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for block in [e.value.data(), &e.first_moment, &e.second_moment] {
                for v in block {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint(String::from("bad magic")));
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let step = r.u64()?;
        let count = r.u32()? as usize;
        let mut store = ParamStore::new();
        store.step = step;
        for _ in 0..count {
            let name_len = r.u32()? as usize;
            let name = core::str::from_utf8(r.take(name_len)?)
                .map_err(|_| Error::Checkpoint(String::from("parameter name is not UTF-8")))?;
            let name = String::from(name);
            let trainable = match r.take(1)?[0] {
                0 => false,
                1 => true,
                b => return Err(Error::Checkpoint(format!("bad trainable flag {b} for {name}"))),
            };
            let ndim = r.u32()? as usize;
            if ndim != 2 {
                return Err(Error::Checkpoint(format!("{name}: expected 2 dims, found {ndim}")));
            }
            let rows = r.u64()? as usize;
            let cols = r.u64()? as usize;
            let n = rows
                .checked_mul(cols)
                .ok_or_else(|| Error::Checkpoint(format!("{name}: shape overflow")))?;
            let value = Tensor::from_vec(rows, cols, r.f64s(n)?)?;
            let first_moment = r.f64s(n)?;
            let second_moment = r.f64s(n)?;
            store.insert(&name, value, trainable)?;
            let e = store.entries.last_mut().expect("just inserted");
            e.first_moment = first_moment;
            e.second_moment = second_moment;
        }
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(store)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Checkpoint(String::from("truncated file")))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::Checkpoint(String::from("size overflow")))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ParamStore {
        let mut s = ParamStore::new();
        s.insert("b", Tensor::row(&[1.5, -0.0, f64::MIN_POSITIVE]), true).unwrap();
        s.insert("a", Tensor::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap(), false).unwrap();
        s.entries[0].first_moment = vec![0.25, 0.5, 0.75];
        s.step = 17;
        s
    }

    #[test]
    fn checkpoint_round_trip_is_byte_identical() {
        let s = sample();
        let bytes = s.to_bytes();
        let back = ParamStore::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.get("b").unwrap().data()[1].to_bits(), (-0.0f64).to_bits());
        assert_eq!(back.step(), 17);
        assert!(!back.entry(back.index_of("a").unwrap()).trainable());
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut s = sample();
        assert_eq!(s.insert("a", Tensor::scalar(0.0), true), Err(Error::DuplicateParam("a".into())));
    }

    #[test]
    fn truncated_checkpoint_rejected() {
        let bytes = sample().to_bytes();
        assert!(ParamStore::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(ParamStore::from_bytes(b"NOTACKPT").is_err());
    }

    #[test]
    fn load_from_reports_shape_mismatch() {
        let mut target = ParamStore::new();
        target.insert("a", Tensor::zeros(3, 2), true).unwrap();
        let err = target.load_from(&sample(), &["a"]).unwrap_err();
        match err {
            Error::Checkpoint(msg) => assert!(msg.contains("a (checkpoint [2, 2], model [3, 2])"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
