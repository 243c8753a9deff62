pub mod syntax;
pub mod localfield;
pub mod presburger;
pub mod eval;
pub mod motivic;
pub mod integrate;
pub mod transfer;
pub mod zsums;
