//! Finite signatures: ordered endogenous variables with finite domains.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Endogenous variables in declaration order, each with a nonempty finite
/// domain of value symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    names: Vec<String>,
    domains: Vec<Vec<String>>,
}

impl Signature {
    /// Builds a signature, rejecting duplicate names, empty domains and
    /// repeated values.
    pub fn new<N, V, I>(vars: I) -> Result<Self>
    where
        N: Into<String>,
        V: Into<String>,
        I: IntoIterator<Item = (N, Vec<V>)>,
    {
        let mut names = Vec::new();
        let mut domains = Vec::new();
        let mut seen = BTreeSet::new();
        for (name, dom) in vars {
            let name = name.into();
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidModel(alloc::format!("variable `{name}` declared twice")));
            }
            let dom: Vec<String> = dom.into_iter().map(Into::into).collect();
            if dom.is_empty() {
                return Err(Error::InvalidModel(alloc::format!("variable `{name}` has an empty domain")));
            }
            let distinct: BTreeSet<&String> = dom.iter().collect();
            if distinct.len() != dom.len() {
                return Err(Error::InvalidModel(alloc::format!("domain of `{name}` repeats a value")));
            }
            names.push(name);
            domains.push(dom);
        }
        Ok(Signature { names, domains })
    }

    /// Every variable gets the domain `{0, 1}`.
    pub fn binary(names: &[&str]) -> Self {
        Self::new(names.iter().map(|n| (*n, alloc::vec!["0", "1"]))).expect("distinct names")
    }

    /// Every variable gets the domain `{0, .., size-1}`.
    pub fn uniform(names: &[&str], size: usize) -> Self {
        let dom: Vec<String> = (0..size).map(|v| v.to_string()).collect();
        Self::new(names.iter().map(|n| (*n, dom.clone()))).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn domain(&self, idx: usize) -> &[String] {
        &self.domains[idx]
    }

    pub fn domain_of(&self, name: &str) -> Option<&[String]> {
        self.index_of(name).map(|i| self.domain(i))
    }

    pub fn value_index(&self, var: usize, value: &str) -> Option<usize> {
        self.domains[var].iter().position(|v| v == value)
    }

    /// Resolves `var=value` to indices, reporting unknown names.
    pub fn resolve(&self, var: &str, value: &str) -> Result<(usize, usize)> {
        let vi = self.index_of(var).ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let xi = self.value_index(vi, value).ok_or_else(|| Error::ValueOutsideDomain {
            var: var.to_string(),
            value: value.to_string(),
        })?;
        Ok((vi, xi))
    }

    /// Number of total instantiations of all variables.
    pub fn instantiation_count(&self) -> usize {
        self.domains.iter().map(Vec::len).product()
    }

    /// Iterates every variable with its domain.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.names.iter().zip(&self.domains).map(|(n, d)| (n.as_str(), d.as_slice()))
    }
}
