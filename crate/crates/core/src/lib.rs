//! Compiles mathematical scene descriptions into watertight, printable
//! triangle meshes.

pub mod expr;
pub mod geom;
pub mod implicit;
pub mod mesh;
pub mod meshio;
pub mod scene;
pub mod tessellate;
