use triangle_mop::*;
use triangle_mop::hermite_pade::*;
use triangle_mop::quadrature::*;
use triangle_mop::scalar::ratio;
fn main(){
  let params = ParamSet::new(vec![ratio(0,1),ratio(3,2)], vec![ratio(1,2),ratio(4,3)], ratio(0,1)).unwrap();
  let pairs = vec![IndexPair::new(2,1).unwrap();2];
  let pf = params.to_f64();
  for j in 0..2 {
    for (name, opts) in [("corrected", NumeratorOptions::default()), ("unit", NumeratorOptions{unit_beta_ratios:true, ..Default::default()}), ("psi22lit", NumeratorOptions{psi22_first_measure:true, ..Default::default()})] {
      let s = NumeratorState::from_params(&params,&pairs,j,opts).unwrap();
      let a = s.denominator().clone();
      for &(z,w) in &[(2.0,2.0),(5.0,10.0),(20.0,20.0),(2.0,20.0),(11.0,3.0)] {
        let phi = s.phi(z,w).unwrap();
        let d = phi_direct(&a,&pf,j,z,w,64).unwrap();
        let p1 = s.psi11(z,w)+s.psi12(z,w).unwrap();
        let d1 = psi1_direct(&a,&pf,j,z,w,64).unwrap();
        let p2 = s.psi21(z,w)+s.psi22(z,w).unwrap();
        let d2 = psi2_direct(&a,&pf,j,z,w,64).unwrap();
        let e = e_direct(&pf,j,z,w,64).unwrap();
        let r = s.approximant(z,w,1e-12).unwrap();
        println!("j={} {:9} ({},{}) phi rel {:.2e}  psi1 rel {:.2e} psi2 rel {:.2e}  R relerr {:.3e}", j+1, name, z,w, ((phi-d)/d).abs(), ((p1-d1)/d1).abs(), ((p2-d2)/d2).abs(), ((e-r)/e).abs());
      }
    }
  }
}
