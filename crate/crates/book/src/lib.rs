//! The chapters of `book/`, included verbatim so that `cargo test` runs
//! their code blocks.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(intro, "intro.md");
chapter!(fields, "fields.md");
chapter!(formulas, "formulas.md");
chapter!(evaluation, "evaluation.md");
chapter!(presburger, "presburger.md");
chapter!(motivic, "motivic.md");
chapter!(integration, "integration.md");
chapter!(transfer, "transfer.md");
chapter!(term_sums, "term-sums.md");
chapter!(cli, "cli.md");

#[doc = include_str!("../../../README.md")]
pub mod readme {}
