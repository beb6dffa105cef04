mod common;

use common::{social_graph, social_query, rng};
use oblivgm::engine::{sec_match, EngineConfig};
use oblivgm::graph::{encrypt_graph, AttributedGraph};
use oblivgm::net::{op, run_local_trio, run_tcp_trio, Frame, LocalTransport, Party, PartyConfig, Transport};
use oblivgm::query::{gen_token, QueryGraph};
use oblivgm::rss::PartyId;
use oblivgm::Error;

#[test]
fn setup_then_zero_shares_cancel() {
    let out = run_local_trio(PartyConfig::trio(1, 1), [(); 3], |party, ()| party.zero_share(256)).unwrap();
    assert!(out[0].xor(&out[1]).unwrap().xor(&out[2]).unwrap().count_ones() == 0);
}

#[test]
fn duplicate_party_index_is_rejected() {
    let mut c = PartyConfig::trio(1, 1);
    c[2].party = PartyId::ALL[0];
    assert!(matches!(run_local_trio(c, [(); 3], |_, ()| Ok(())), Err(Error::DuplicateParty(1))));
}

fn echo(party: &mut Party, payload: Vec<u8>) -> oblivgm::Result<Vec<u8>> {
    party.begin_round();
    let me = party.id();
    party.send_round(me.next(), op::ECHO, payload, 0)?;
    party.recv_round(me.prev(), op::ECHO)
}

#[test]
fn one_mib_echo_over_both_transports() {
    let payload: Vec<u8> = (0..1 << 20).map(|i| (i * 31 % 251) as u8).collect();
    let inputs = [0, 1, 2].map(|_| payload.clone());
    for out in [
        run_local_trio(PartyConfig::trio(2, 2), inputs.clone(), echo).unwrap(),
        run_tcp_trio(PartyConfig::trio(2, 2), inputs, echo).unwrap(),
    ] {
        assert!(out.iter().all(|o| *o == payload));
    }
}

#[test]
fn ten_thousand_frames_arrive_in_order() {
    let out = run_local_trio(PartyConfig::trio(3, 3), [(); 3], |party, ()| {
        let mut got = Vec::new();
        for i in 0u32..10_000 {
            got.push(u32::from_le_bytes(echo(party, i.to_le_bytes().to_vec())?.try_into().unwrap()));
        }
        Ok(got)
    })
    .unwrap();
    assert!(out.iter().all(|g| g.iter().copied().eq(0..10_000)));
}

#[test]
fn injected_future_round_is_a_skew_error() {
    let [mut a, b, c] = LocalTransport::mesh();
    let setup = |t: LocalTransport| Party::setup(PartyConfig::trio(4, 4)[t.party().index()].clone(), Box::new(t));
    let handles = [b, c].map(|t| std::thread::spawn(move || setup(t)));
    // Play party 1 by hand: complete setup, then send a frame from round 7.
    let me = PartyId::ALL[0];
    a.send(me.next(), &Frame { session: 4, round: 1, op: op::SETUP, payload: vec![0; 32] }).unwrap();
    a.recv(me.prev()).unwrap();
    let mut parties: Vec<Party> = handles.into_iter().map(|h| h.join().unwrap().unwrap()).collect();
    a.send(me.next(), &Frame { session: 4, round: 7, op: op::ECHO, payload: vec![1] }).unwrap();
    parties[0].begin_round();
    let err = parties[0].recv_round(me, op::ECHO).unwrap_err();
    assert!(matches!(err, Error::RoundSkew { expected: 2, actual: 7 }), "{err:?}");
}

#[test]
fn tcp_and_local_transcripts_agree() {
    let g = AttributedGraph::parse(&social_graph()).unwrap();
    let enc = encrypt_graph(&g, 2, &mut rng(1)).unwrap();
    let q = QueryGraph::parse(&social_query()).unwrap();
    let tokens = gen_token(&q, &enc.sidecar.schema, &mut rng(2)).unwrap();
    let inputs = [0, 1, 2].map(|i| (&enc.shares[i], &tokens[i]));
    let run = |party: &mut Party, (g, t): (&_, &_)| {
        let r = sec_match(party, t, g, &EngineConfig::default())?;
        Ok((party.transcript_digest(), r.to_bytes()))
    };
    let local = run_local_trio(PartyConfig::trio(5, 9), inputs, run).unwrap();
    let tcp = run_tcp_trio(PartyConfig::trio(5, 9), inputs, run).unwrap();
    let again = run_local_trio(PartyConfig::trio(5, 9), inputs, run).unwrap();
    assert_eq!(local, tcp);
    assert_eq!(local, again);
}
