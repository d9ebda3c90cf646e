pub mod field;
pub mod quantum;
pub mod om;
pub mod toy;
pub mod lp;
pub mod pbr;
pub mod hardy;
pub mod gaussian;
pub mod report;
