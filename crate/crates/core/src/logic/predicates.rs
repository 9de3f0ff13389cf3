use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Comparisons written infix in the concrete syntax.
pub const INFIX_PREDICATES: [&str; 6] = [">=", "<=", "=", "<", ">", "!="];

type Decide = Arc<dyn Fn(&[i128]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Predicate {
    pub arity: usize,
    decide: Decide,
}

impl Predicate {
    pub fn new(arity: usize, decide: impl Fn(&[i128]) -> bool + Send + Sync + 'static) -> Self {
        Predicate {
            arity,
            decide: Arc::new(decide),
        }
    }

    pub fn holds(&self, args: &[i128]) -> bool {
        (self.decide)(args)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Predicate").field("arity", &self.arity).finish()
    }
}

/// Named numerical predicates. Always contains the comparisons and `P_exists`.
#[derive(Clone, Debug)]
pub struct PredicateCollection {
    entries: BTreeMap<String, Predicate>,
}

impl PredicateCollection {
    pub fn builtin() -> Self {
        let mut entries = BTreeMap::new();
        let cmp: [(&str, fn(i128, i128) -> bool); 6] = [
            (">=", |a, b| a >= b),
            ("<=", |a, b| a <= b),
            ("=", |a, b| a == b),
            ("<", |a, b| a < b),
            (">", |a, b| a > b),
            ("!=", |a, b| a != b),
        ];
        for (name, op) in cmp {
            entries.insert(name.to_string(), Predicate::new(2, move |v| op(v[0], v[1])));
        }
        entries.insert("P_exists".into(), Predicate::new(1, |v| v[0] >= 1));
        PredicateCollection { entries }
    }

    /// Registers or replaces a predicate. Built-in names cannot be replaced.
    pub fn register(
        &mut self,
        name: &str,
        arity: usize,
        decide: impl Fn(&[i128]) -> bool + Send + Sync + 'static,
    ) -> Result<(), String> {
        if INFIX_PREDICATES.contains(&name) || name == "P_exists" {
            return Err(format!("{name} is built in"));
        }
        if !crate::structure::is_identifier(name) {
            return Err(format!("invalid predicate name {name:?}"));
        }
        if arity == 0 {
            return Err("predicate arity must be positive".into());
        }
        self.entries.insert(name.to_string(), Predicate::new(arity, decide));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Predicate> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl Default for PredicateCollection {
    fn default() -> Self {
        Self::builtin()
    }
}
