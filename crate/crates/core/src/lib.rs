pub mod bench;
pub mod cli;
pub mod gen;
pub mod io;
pub mod model;
pub mod oracle;
pub mod reform;
