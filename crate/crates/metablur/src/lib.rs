pub fn placeholder() -> usize { metablur_core::placeholder() }
