pub(crate) use alloc::format;
pub(crate) use alloc::string::String;
pub(crate) use alloc::vec;
pub(crate) use alloc::vec::Vec;
// Shadowed by the inherent methods whenever std is linked (test builds).
#[allow(unused_imports)]
pub(crate) use num_traits::Float;
