use std::fmt;
use std::sync::Arc;

use super::Field;
use crate::error::{Error, Result};

/// A field element bound to its field, for checked arithmetic.
///
/// Hot paths (matrices, groups) work on raw codes through [`Field`]; this type
/// is the safe surface where operands from different fields must be rejected.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<Field>,
    code: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Right-hand operand: another element, or an integer (an exponent for
/// [`ArithOp::Pow`], otherwise its image in the prime field).
#[derive(Clone)]
pub enum Operand {
    Elem(FieldElement),
    Int(i64),
}

impl FieldElement {
    pub fn new(field: &Arc<Field>, code: u32) -> Result<Self> {
        if !field.contains(code) {
            return Err(Error::FieldMismatch);
        }
        Ok(FieldElement { field: Arc::clone(field), code })
    }

    pub fn from_coefficients(field: &Arc<Field>, coeffs: &[u32]) -> Result<Self> {
        let code = field.from_coefficients(coeffs)?;
        Ok(FieldElement { field: Arc::clone(field), code })
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.field.coefficients(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn arith(&self, op: ArithOp, rhs: Operand) -> Result<FieldElement> {
        let f = &self.field;
        let code = match (op, rhs) {
            (ArithOp::Pow, Operand::Int(e)) => f.pow(self.code, e)?,
            (ArithOp::Pow, Operand::Elem(_)) => {
                return Err(Error::Unsupported("exponent must be an integer".into()))
            }
            (op, Operand::Elem(b)) => {
                if b.field != self.field {
                    return Err(Error::FieldMismatch);
                }
                self.binary(op, b.code)?
            }
            (op, Operand::Int(n)) => self.binary(op, f.from_int(n))?,
        };
        Ok(FieldElement { field: Arc::clone(f), code })
    }

    fn binary(&self, op: ArithOp, b: u32) -> Result<u32> {
        let f = &self.field;
        Ok(match op {
            ArithOp::Add => f.add(self.code, b),
            ArithOp::Sub => f.sub(self.code, b),
            ArithOp::Mul => f.mul(self.code, b),
            ArithOp::Div => f.div(self.code, b)?,
            ArithOp::Pow => unreachable!(),
        })
    }

    pub fn order(&self) -> Result<u64> {
        self.field.element_order(self.code)
    }

    /// Image in `target` under the fixed subfield embedding.
    pub fn embed(&self, target: &Arc<Field>) -> Result<FieldElement> {
        let code = target.embed_from(&self.field, self.code)?;
        Ok(FieldElement { field: Arc::clone(target), code })
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}∈{}", self.code, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_ops() {
        let f5 = Field::new(5, 1).unwrap();
        let two = FieldElement::new(&f5, 2).unwrap();
        let three = FieldElement::new(&f5, 3).unwrap();
        assert_eq!(two.arith(ArithOp::Mul, Operand::Elem(three.clone())).unwrap().code(), 1);
        assert_eq!(two.arith(ArithOp::Pow, Operand::Int(4)).unwrap().code(), 1);
        assert_eq!(two.arith(ArithOp::Sub, Operand::Int(3)).unwrap().code(), 4);
        let zero = FieldElement::new(&f5, 0).unwrap();
        assert!(matches!(
            two.arith(ArithOp::Div, Operand::Elem(zero)),
            Err(Error::DivisionByZero)
        ));
        let f7 = Field::new(7, 1).unwrap();
        let other = FieldElement::new(&f7, 2).unwrap();
        assert!(matches!(two.arith(ArithOp::Add, Operand::Elem(other)), Err(Error::FieldMismatch)));
        assert!(FieldElement::new(&f5, 5).is_err());
    }

    #[test]
    fn embed_preserves_order() {
        let f5 = Field::new(5, 1).unwrap();
        let f25 = Field::new(5, 2).unwrap();
        let two = FieldElement::new(&f5, 2).unwrap();
        assert_eq!(two.embed(&f25).unwrap().order().unwrap(), 4);
    }
}
