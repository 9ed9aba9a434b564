pub mod delta;
pub mod igklo;
pub mod oracle;
pub mod qtorus;
pub mod relcheck;
pub mod satake;
pub mod scalar;
