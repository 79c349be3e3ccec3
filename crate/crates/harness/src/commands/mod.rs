pub mod fig1;
pub mod fig2;
pub mod sweep;
pub mod validate;
