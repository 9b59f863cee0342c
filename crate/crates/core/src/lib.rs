//! Configurations of objects in a concrete abelian category, indexed by
//! finite posets: quiver representations over prime fields, subobject
//! families, sub/quotient/substitution operations and best configurations.

pub mod cli;
pub mod config;
pub mod doc;
pub mod exactla;
pub mod improve;
pub mod poset;
pub mod quivercat;
