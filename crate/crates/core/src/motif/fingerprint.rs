use std::fmt;

use sha2::{Digest, Sha256};

use crate::ingest::PaperId;

/// Digest of a reference set. Each id is length-prefixed before hashing so
/// `{"A","BC"}` and `{"AB","C"}` cannot collide by concatenation; the set
/// size is carried alongside so the empty set is trivially distinguished.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReferenceFingerprint {
    len: usize,
    digest: [u8; 32],
}

impl ReferenceFingerprint {
    pub fn is_empty_set(&self) -> bool {
        self.len == 0
    }

    pub fn set_len(&self) -> usize {
        self.len
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.digest)
    }
}

impl fmt::Debug for ReferenceFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({}:{})", self.len, &self.to_hex()[..12])
    }
}

pub fn fingerprint<'a, I>(references: I) -> ReferenceFingerprint
where
    I: IntoIterator<Item = &'a PaperId>,
{
    let mut ids: Vec<&str> = references.into_iter().map(PaperId::as_str).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut hasher = Sha256::new();
    for id in &ids {
        hasher.update((id.len() as u64).to_le_bytes());
        hasher.update(id.as_bytes());
    }
    ReferenceFingerprint {
        len: ids.len(),
        digest: hasher.finalize().into(),
    }
}
