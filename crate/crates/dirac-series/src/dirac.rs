pub struct DiracResult; pub enum SpinStatus { ClosedForm } pub fn classify() {}
