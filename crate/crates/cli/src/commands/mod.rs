pub mod interfere;
pub mod modes;
pub mod noise;
pub mod scaling;
pub mod tomo;
