use std::collections::BTreeMap;

use crate::functors::{Functor, FunctorError};
use crate::kernel::{Category, CategoryError};

/// Named categories and functors between them.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    pub categories: BTreeMap<String, Category>,
    pub functors: BTreeMap<String, Functor>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_category(&mut self, cat: Category) -> Result<(), CategoryError> {
        if self.categories.contains_key(&cat.name) {
            return Err(CategoryError::DuplicateName(cat.name));
        }
        self.categories.insert(cat.name.clone(), cat);
        Ok(())
    }

    pub fn add_functor(&mut self, functor: Functor) -> Result<(), FunctorError> {
        if self.functors.contains_key(&functor.name) {
            return Err(FunctorError::DuplicateName(functor.name));
        }
        self.functors.insert(functor.name.clone(), functor);
        Ok(())
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.get(name)
    }
}
