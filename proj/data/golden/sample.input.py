def information_extraction(input_text, entity_attribute, scene_graph):
    """first , extract entities from text .
        second , extract entity chains base on entities .
        third , extract entity chains relation based on entity chains .
        fourth , inferring the visual area coordinate and type in the image based on the scene graph ."""
    input_text = "Bob Hope was born in 1903 ."
    entity_attribute = """
        PER: [{name: Bob Hope, occupation: actor}]
        TIME: [{name: 1903, incident: birth of Bob Hope}]
        """
    scene_graph = """
        Img_1: [[person, boat, stand]]
        """
    entity_dic = {}
    chain_dic = {}
    relation_dic = {}
    grounding_dic = {}
    # extacted entities , entity chains , relations and visual areas
