use std::collections::HashMap;

use crate::{Error, Result};

/// Ordered list of distinct element identifiers. Elements are addressed by
/// their position everywhere else in the crate.
#[derive(Clone, Debug, Default)]
pub struct GroundSet {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
    }
}

impl GroundSet {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate ground element id `{id}`")));
            }
        }
        Ok(GroundSet { ids, index })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, element: usize) -> &str {
        &self.ids[element]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn resolve<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| {
                let id = id.as_ref();
                self.index_of(id)
                    .ok_or_else(|| Error::Domain(format!("element `{id}` is not in the ground set")))
            })
            .collect()
    }

    pub fn names(&self, elements: &[usize]) -> Vec<String> {
        elements.iter().map(|&e| self.ids[e].clone()).collect()
    }

    pub(crate) fn check(&self, elements: &[usize]) -> Result<()> {
        match elements.iter().find(|&&e| e >= self.len()) {
            Some(e) => Err(Error::Domain(format!(
                "element index {e} is outside the ground set of size {}",
                self.len()
            ))),
            None => Ok(()),
        }
    }
}
