//! Named strategies behind trait objects: the interchangeable primitive and
//! normal element tests, and the subset families for experiments.

use crate::characters::{Characters, NormalDd, NormalDfTable};
use crate::error::{Error, Result};
use crate::field::{ExtElement, FieldCtx, NormalTest};
use crate::subsets::{HammingFamily, HeightFamily, SubsetFamily, UniformFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Primitive,
    Normal,
}

/// One way of deciding a property of nonzero elements.
pub trait ElementTest: Send + Sync {
    fn name(&self) -> &'static str;
    fn property(&self) -> Property;
    /// Precomputes whatever the test needs for this field.
    fn bind<'a>(&self, ch: &'a Characters<'a>) -> Result<Box<dyn BoundTest + 'a>>;
}

pub trait BoundTest {
    /// None when the method does not apply to this field.
    fn decide(&self, a: &ExtElement) -> Result<Option<bool>>;
}

struct Closure<F>(F);

impl<F: Fn(&ExtElement) -> Result<Option<bool>>> BoundTest for Closure<F> {
    fn decide(&self, a: &ExtElement) -> Result<Option<bool>> {
        (self.0)(a)
    }
}

fn bound<'a, F>(f: F) -> Box<dyn BoundTest + 'a>
where
    F: Fn(&ExtElement) -> Result<Option<bool>> + 'a,
{
    Box::new(Closure(f))
}

macro_rules! element_test {
    ($ty:ident, $name:literal, $prop:expr, |$ch:ident| $body:expr) => {
        pub struct $ty;
        impl ElementTest for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn property(&self) -> Property {
                $prop
            }
            fn bind<'a>(&self, $ch: &'a Characters<'a>) -> Result<Box<dyn BoundTest + 'a>> {
                $body
            }
        }
    };
}

element_test!(PrimitiveByOrder, "primitive.order", Property::Primitive, |ch| {
    let ctx: &FieldCtx = ch.ctx();
    Ok(bound(move |a| Ok(Some(ctx.multiplicative_order(a)? == ctx.size() - 1))))
});

element_test!(PrimitiveByPowers, "primitive.power-test", Property::Primitive, |ch| {
    let ctx = ch.ctx();
    Ok(bound(move |a| ctx.is_primitive(a).map(Some)))
});

element_test!(PrimitiveByDivisorSum, "primitive.dd", Property::Primitive, |ch| {
    Ok(bound(move |a| Ok(Some(ch.indicator_primitive_dd(a)? == 1))))
});

element_test!(PrimitiveByFourier, "primitive.df", Property::Primitive, |ch| {
    Ok(bound(move |a| Ok(Some(ch.indicator_primitive_df(a)? == 1))))
});

element_test!(NormalByDivisors, "normal.divisor", Property::Normal, |ch| {
    let ctx = ch.ctx();
    Ok(bound(move |a| Ok(Some(ctx.is_normal(a, NormalTest::Divisor)))))
});

element_test!(NormalByRank, "normal.rank", Property::Normal, |ch| {
    let ctx = ch.ctx();
    Ok(bound(move |a| Ok(Some(ctx.is_normal(a, NormalTest::Rank)))))
});

element_test!(NormalByDivisorSum, "normal.dd", Property::Normal, |ch| {
    Ok(bound(move |a| {
        Ok(match ch.indicator_normal_dd(a)? {
            NormalDd::Value(v) => Some(v == 1),
            NormalDd::NotApplicable => None,
        })
    }))
});

element_test!(NormalByFourier, "normal.df", Property::Normal, |ch| {
    let table: NormalDfTable = ch.normal_df_table(ch.tau())?;
    Ok(bound(move |a| Ok(Some(ch.indicator_normal_df(a, &table)? == 1))))
});

/// Entries in registration order, looked up by name.
pub struct Registry<T: ?Sized> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Registry { entries: Vec::new() }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| &**b)
    }
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn register(&mut self, item: Box<T>) {
        assert!(self.iter().all(|t| t.name() != item.name()), "duplicate name {}", item.name());
        self.entries.push(item);
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.iter().find(|t| t.name() == name).ok_or_else(|| unknown(name, self.iter().map(|t| t.name())))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.iter().map(|t| t.name()).collect()
    }
}

impl Registry<dyn ElementTest> {
    pub fn for_property(&self, p: Property) -> impl Iterator<Item = &dyn ElementTest> {
        self.iter().filter(move |t| t.property() == p)
    }
}

pub trait Named {
    fn name(&self) -> &'static str;
}

impl Named for dyn ElementTest {
    fn name(&self) -> &'static str {
        ElementTest::name(self)
    }
}

impl Named for dyn SubsetFamily {
    fn name(&self) -> &'static str {
        SubsetFamily::name(self)
    }
}

fn unknown<'a>(name: &str, known: impl Iterator<Item = &'a str>) -> Error {
    Error::Validation(format!("unknown method \"{name}\"; known: {}", known.collect::<Vec<_>>().join(", ")))
}

pub fn element_tests() -> Registry<dyn ElementTest> {
    let mut r: Registry<dyn ElementTest> = Registry::new();
    r.register(Box::new(PrimitiveByOrder));
    r.register(Box::new(PrimitiveByPowers));
    r.register(Box::new(PrimitiveByDivisorSum));
    r.register(Box::new(PrimitiveByFourier));
    r.register(Box::new(NormalByDivisors));
    r.register(Box::new(NormalByRank));
    r.register(Box::new(NormalByDivisorSum));
    r.register(Box::new(NormalByFourier));
    r
}

pub fn subset_families() -> Registry<dyn SubsetFamily> {
    let mut r: Registry<dyn SubsetFamily> = Registry::new();
    r.register(Box::new(UniformFamily));
    r.register(Box::new(HammingFamily));
    r.register(Box::new(HeightFamily));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_resolvable() {
        let reg = element_tests();
        let names = reg.names();
        assert_eq!(names.len(), 8);
        for n in &names {
            assert_eq!(reg.get(n).unwrap().name(), *n);
        }
        assert!(matches!(reg.get("banana"), Err(Error::Validation(_))));
        assert_eq!(reg.for_property(Property::Primitive).count(), 4);
        assert_eq!(subset_families().names(), vec!["uniform", "hammingBall", "heightBox"]);
    }

    #[test]
    fn all_methods_agree() {
        for (p, k, n) in [(2, 1, 4), (3, 1, 2), (2, 2, 3), (5, 1, 2), (3, 1, 3), (2, 1, 1)] {
            let ctx = FieldCtx::build(p, k, n, None, None).unwrap();
            let ch = Characters::new(&ctx).unwrap();
            let reg = element_tests();
            let bound: Vec<_> = reg.iter().map(|t| (t.property(), t.bind(&ch).unwrap())).collect();
            for a in ctx.elements().skip(1) {
                let want_p = ctx.is_primitive(&a).unwrap();
                let want_n = ctx.is_normal(&a, NormalTest::Rank);
                for (prop, b) in &bound {
                    let want = if *prop == Property::Primitive { want_p } else { want_n };
                    match b.decide(&a).unwrap() {
                        Some(v) => assert_eq!(v, want),
                        None => assert_eq!(n as u64 % p, 0),
                    }
                }
            }
        }
    }
}
