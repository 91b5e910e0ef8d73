import tensorflow as tf


def load_model(export_dir):
    session = make_session()
    meta_graph_def=tf.saved_model.load(export_dir)
    return meta_graph_def
