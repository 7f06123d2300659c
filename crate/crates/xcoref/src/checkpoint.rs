use std::fs;
use std::path::Path;

use xcoref_core::autodiff::ParamStore;

use crate::error::{io_err, HarnessError, Result};

pub fn save_checkpoint(path: &Path, store: &ParamStore) -> Result<()> {
    fs::write(path, store.to_bytes()).map_err(io_err(path))
}

pub fn load_checkpoint(path: &Path) -> Result<ParamStore> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    ParamStore::from_bytes(&bytes).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use xcoref_core::autodiff::Tensor;

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = ParamStore::new();
        s.insert("w", Tensor::from_vec(2, 2, vec![1.0, -2.5, 3.25, 0.0]).unwrap(), true).unwrap();
        s.insert("e", Tensor::zeros(3, 1), false).unwrap();
        let (a, b) = (dir.path().join("a.ckpt"), dir.path().join("b.ckpt"));
        save_checkpoint(&a, &s).unwrap();
        save_checkpoint(&b, &load_checkpoint(&a).unwrap()).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }

    #[test]
    fn garbage_is_rejected_with_path() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.ckpt");
        fs::write(&p, b"nope").unwrap();
        assert!(load_checkpoint(&p).unwrap_err().to_string().contains("bad.ckpt"));
    }
}
