//! Name-keyed registries of interchangeable strategies.
//!
//! Coefficient engines and design strategies are trait objects registered
//! under a string name and looked up at runtime from configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    default: Option<String>,
    entries: BTreeMap<String, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    /// An empty registry; `kind` names the strategy family in error messages.
    pub fn new(kind: &'static str) -> Self {
        Self { kind, default: None, entries: BTreeMap::new() }
    }

    /// Registers `item` under `name`, replacing any previous entry. The first
    /// registration becomes the default.
    pub fn register(&mut self, name: impl Into<String>, item: Arc<T>) -> &mut Self {
        let name = name.into();
        if self.default.is_none() {
            self.default = Some(name.clone());
        }
        self.entries.insert(name, item);
        self
    }

    pub fn set_default(&mut self, name: &str) -> Result<()> {
        self.get(name)?;
        self.default = Some(name.to_owned());
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownStrategy {
            kind: self.kind,
            name: name.to_owned(),
            available: self.names(),
        })
    }

    /// Looks up `name`, or the default entry when `name` is `None`.
    pub fn resolve(&self, name: Option<&str>) -> Result<Arc<T>> {
        match name.or(self.default.as_deref()) {
            Some(n) => self.get(n),
            None => Err(Error::UnknownStrategy { kind: self.kind, name: String::new(), available: vec![] }),
        }
    }

    pub fn default_name(&self) -> Option<&str> {
        self.default.as_deref()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }
}

impl<T: ?Sized> std::fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("default", &self.default)
            .field("names", &self.names())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Send + Sync {
        fn greet(&self) -> String;
    }
    struct Hello;
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }

    #[test]
    fn lookup_and_unknown_name() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        reg.register("hello", Arc::new(Hello));
        assert_eq!(reg.get("hello").unwrap().greet(), "hello");
        assert_eq!(reg.resolve(None).unwrap().greet(), "hello");
        match reg.get("bye") {
            Err(Error::UnknownStrategy { kind, name, available }) => {
                assert_eq!(kind, "greeter");
                assert_eq!(name, "bye");
                assert_eq!(available, vec!["hello".to_string()]);
            }
            _ => panic!("expected unknown strategy"),
        }
        assert!(reg.set_default("bye").is_err());
    }
}
