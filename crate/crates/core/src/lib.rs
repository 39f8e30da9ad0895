pub mod exactgeom;
pub mod planar;
pub mod surface;
pub mod homology;
pub mod unfold;
pub mod cover;
pub mod windtree;
pub mod flow;
pub mod modelfile;
pub mod svg;
pub mod cli;
