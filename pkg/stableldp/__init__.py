import logging

from flask import Flask

__version__ = "1.0.0"


def create_app():
    app = Flask(__name__)
    app.config.from_object("stableldp.config.Config")

    # Register blueprints
    from stableldp.commands.density import bp as density_bp
    from stableldp.commands.sample import bp as sample_bp
    from stableldp.commands.rate import bp as rate_bp
    from stableldp.commands.dist import bp as dist_bp
    from stableldp.commands.gamma import bp as gamma_bp
    from stableldp.commands.tails import bp as tails_bp
    from stableldp.commands.validate import bp as validate_bp

    app.register_blueprint(density_bp)
    app.register_blueprint(sample_bp)
    app.register_blueprint(rate_bp)
    app.register_blueprint(dist_bp)
    app.register_blueprint(gamma_bp)
    app.register_blueprint(tails_bp)
    app.register_blueprint(validate_bp)

    # Logging
    logging.basicConfig(level=logging.INFO)
    app.logger.setLevel(logging.INFO)

    return app
