//! Sum capacity against feedback gain, and what each feedback level buys.

use ldbfn::cli::net_gain_row;
use ldbfn::ChannelParams;

fn main() -> ldbfn::Result<()> {
    for base in [ChannelParams::new(6, 3, 1, 0), ChannelParams::new(5, 5, 1, 0), ChannelParams::new(2, 1, 3, 0)] {
        println!("{base}");
        for nf in 0..=4 {
            let row = net_gain_row(&base, nf)?;
            let eta = row.eta.map_or("-".to_string(), |e| e.to_string());
            println!("  n_f={nf}  C={:<3} r_f={}  eta={eta}", row.sum_capacity.to_string(), row.rf);
        }
    }
    Ok(())
}
