from neel_lab.cli.base import CommandRouter
from neel_lab.cli.commands import asym, bcs, dos, figure, gap, mhat, neel, verify

cli_router = CommandRouter()

cli_router.include_router(dos.router)
cli_router.include_router(neel.router)
cli_router.include_router(gap.router)
cli_router.include_router(mhat.router)
cli_router.include_router(bcs.router)
cli_router.include_router(asym.router)
cli_router.include_router(verify.router)
cli_router.include_router(figure.router)
