import pytest


@pytest.fixture(scope="session")
def chain1():
    from qcfeff.gradedlie import build_chain

    return build_chain(1)


@pytest.fixture(scope="session")
def chain2():
    from qcfeff.gradedlie import build_chain

    return build_chain(2)


@pytest.fixture(scope="session")
def inclusions1(chain1):
    from qcfeff import inclusions as inc

    qc, cr, co = chain1
    phi1 = inc.build_phi_qc_cr(qc, cr)
    phi2 = inc.build_phi_cr_co(cr, co)
    phic = inc.compose(phi1, phi2)
    return qc, cr, co, phi1, phi2, phic


@pytest.fixture(scope="session")
def inclusions2(chain2):
    from qcfeff import inclusions as inc

    qc, cr, co = chain2
    phi1 = inc.build_phi_qc_cr(qc, cr)
    phi2 = inc.build_phi_cr_co(cr, co)
    phic = inc.compose(phi1, phi2)
    return qc, cr, co, phi1, phi2, phic


@pytest.fixture(scope="session")
def quadric1():
    from qcfeff.models import quadric_model

    return quadric_model(1)


@pytest.fixture(scope="session")
def heisenberg1():
    from qcfeff.models import heisenberg_qc

    return heisenberg_qc(1)
