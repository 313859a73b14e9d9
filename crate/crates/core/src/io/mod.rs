//! File formats: Matrix Market matrices and vectors, partition text files and
//! convergence CSV.

mod csv;
mod matrix_market;
mod partition_file;

pub use csv::{format_convergence_csv, parse_convergence_csv, read_convergence_csv, write_convergence_csv};
pub use matrix_market::{
    format_matrix_market, parse_matrix_market, read_matrix_market, read_vector, write_matrix_market,
    write_vector,
};
pub use partition_file::{format_partition, parse_partition, read_partition, write_partition};
