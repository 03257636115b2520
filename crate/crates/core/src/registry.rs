//! Name-keyed constructor tables for runtime-selected strategies.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

type Constructor<T, P> = Box<dyn Fn(&P) -> Result<Box<T>> + Send + Sync>;

/// Maps a strategy name to a constructor taking parameters `P`.
pub struct Registry<T: ?Sized, P: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Constructor<T, P>>,
}

impl<T: ?Sized, P: ?Sized> Registry<T, P> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Register a constructor; a later registration under the same name replaces it.
    pub fn register<F>(&mut self, name: &str, ctor: F) -> &mut Self
    where
        F: Fn(&P) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.entries.insert(name.to_string(), Box::new(ctor));
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn create(&self, name: &str, params: &P) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(ctor) => ctor(params),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

impl<T: ?Sized, P: ?Sized> fmt::Debug for Registry<T, P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("names", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}
