//! Exact evaluation and numerical checking of mixed character sums modulo
//! squarefree integers and over finite fields.

pub mod characters;
pub mod energy;
pub mod error;
pub mod field;
pub mod harness;
pub mod mean_values;
pub mod mixed;
pub mod modular;
pub mod poly;
pub mod reduce;
